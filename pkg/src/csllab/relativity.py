"""Lorentz boost arithmetic for event pairs on one spatial axis.

Covers the standard boost transformation, the effective velocity connecting
two events, classification of their temporal order in a boosted frame, and
the minimum boost speed that inverts the order of a spacelike-connected pair.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .constants import constants
from .errors import ContractViolationError, NoInversionPossibleError

SIMULTANEITY_TOL = 1e-30  # seconds; far below any timescale in scope


@dataclass(frozen=True)
class Event:
    """Spacetime point: position along the boost axis (m) and time (s)."""

    x: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.t)):
            raise ContractViolationError("event coordinates must be finite")


@dataclass(frozen=True)
class Boost:
    """Signed boost speed along the shared axis; |v| < c enforced."""

    v: float

    def __post_init__(self):
        if abs(self.v) >= constants().c:
            raise ContractViolationError(f"boost speed |{self.v}| must be below c")

    @property
    def gamma(self) -> float:
        beta = self.v / constants().c
        return 1.0 / math.sqrt(1.0 - beta * beta)


class Ordering(enum.Enum):
    SAME = "Same"
    INVERTED = "Inverted"
    SIMULTANEOUS = "Simultaneous"


def transform(event: Event, boost: Boost) -> Event:
    """x' = gamma (x - v t), t' = gamma (t - v x / c^2)."""
    c = constants().c
    g = boost.gamma
    return Event(
        x=g * (event.x - boost.v * event.t),
        t=g * (event.t - boost.v * event.x / c**2),
    )


def effective_velocity(a: Event, b: Event) -> float:
    """(x_B - x_A)/(t_B - t_A); may exceed c.

    Simultaneous events return the infinity marker rather than raising: an
    infinite effective velocity is a meaningful input downstream.
    """
    dt = b.t - a.t
    if dt == 0.0:
        return math.inf if b.x >= a.x else -math.inf
    return (b.x - a.x) / dt


def time_order(a: Event, b: Event, boost: Boost) -> dict:
    """Boosted time interval and ordering classification.

    The interval is gamma (t_B - t_A)(1 - v v_AB / c^2), evaluated through the
    transformation directly so that simultaneous rest-frame pairs are handled
    without the indeterminate product.
    """
    c = constants().c
    dt = b.t - a.t
    dx = b.x - a.x
    dt_boosted = boost.gamma * (dt - boost.v * dx / c**2)
    if abs(dt_boosted) < SIMULTANEITY_TOL:
        ordering = Ordering.SIMULTANEOUS
    elif dt == 0.0:
        # ordered in the boosted frame only; no rest-frame order to preserve
        ordering = Ordering.INVERTED
    elif (dt_boosted > 0) == (dt > 0):
        ordering = Ordering.SAME
    else:
        ordering = Ordering.INVERTED
    return {"delta_t_boosted": dt_boosted, "ordering": ordering}


def min_inversion_boost(a: Event, b: Event) -> float:
    """Smallest boost speed (signed, same sense as v_AB) that inverts the order.

    Exists only for |v_AB| > c; equals c^2 / v_AB.  Every boost of larger
    magnitude and matching sign yields an inverted ordering.
    """
    c = constants().c
    v_ab = effective_velocity(a, b)
    if math.isinf(v_ab):
        return 0.0 if v_ab > 0 else -0.0
    if abs(v_ab) <= c:
        raise NoInversionPossibleError(
            f"|v_AB| = {abs(v_ab):.6g} m/s <= c; ordering is boost-invariant"
        )
    return c**2 / v_ab
