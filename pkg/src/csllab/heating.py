"""Bulk-heating effective coupling for white and Gaussian-cutoff spectra.

The phonon-emission heating rate is governed by

  lambda_eff = (2 / (3 pi^{3/2})) Integral d^3w e^{-w^2} w^2 lambda(omega_L(w / r_c)),

which isotropy reduces to (8 / (3 sqrt(pi))) Integral_0^inf dw w^4 e^{-w^2}
lambda(v_s w / r_c) for a linear dispersion omega_L(q) = v_s |q|.  For the two
supported spectra a closed form exists and the adaptive quadrature is checked
against it:

  white:            lambda_eff = lambda0
  Gaussian cutoff:  lambda_eff = lambda0 (1 + beta^2)^{-5/2},  beta = v_s t_c / r_c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import PaperConstants, constants
from .errors import ContractViolationError, QuadratureError
from .noise import NoiseKind, NoiseSpectrum

QUADRATURE_RTOL = 1e-9
REPORT_RTOL = 1e-6


@dataclass(frozen=True)
class PhononDispersion:
    """Linear longitudinal phonon branch omega_L(q) = v_s |q|."""

    v_s: float

    def __post_init__(self):
        if self.v_s <= 0:
            raise ContractViolationError("speed of sound must be positive")

    def omega(self, q: float) -> float:
        return self.v_s * abs(q)


@dataclass(frozen=True)
class HeatingResult:
    lambda_eff: float
    lambda_eff_closed_form: float
    beta: float
    passes_bulk_bound: bool
    quadrature_error_estimate: float


def closed_form(spectrum: NoiseSpectrum, dispersion: PhononDispersion) -> float:
    """Analytic lambda_eff for the supported spectra."""
    if spectrum.kind == NoiseKind.WHITE:
        return spectrum.lambda0
    beta = dispersion.v_s * spectrum.t_c / spectrum.r_c
    return spectrum.lambda0 * (1.0 + beta * beta) ** -2.5


def lambda_eff(spectrum: NoiseSpectrum, dispersion: PhononDispersion) -> HeatingResult:
    """Adaptive quadrature of the radial heating integral, with closed-form companion."""
    prefactor = 8.0 / (3.0 * np.sqrt(np.pi))

    def integrand(w):
        return prefactor * w**4 * np.exp(-w * w) * float(
            spectrum.spectral_density(dispersion.omega(w / spectrum.r_c))
        )

    value, abserr = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0,
                                   epsrel=QUADRATURE_RTOL, limit=200)
    if value <= 0.0 or not np.isfinite(value):
        raise QuadratureError(f"heating integral returned {value}")
    rel_err = abserr / value
    if rel_err >= REPORT_RTOL:
        raise QuadratureError(
            f"heating integral relative error {rel_err:.2e} exceeds {REPORT_RTOL:.0e}"
        )
    beta = dispersion.v_s * spectrum.t_c / spectrum.r_c
    return HeatingResult(
        lambda_eff=value,
        lambda_eff_closed_form=closed_form(spectrum, dispersion),
        beta=beta,
        passes_bulk_bound=value < constants().bulk_heating_bound,
        quadrature_error_estimate=rel_err,
    )


def bound_check(result: HeatingResult, consts: PaperConstants,
                dispersion: PhononDispersion, r_c: float) -> dict:
    """Compare a heating result against the bulk bound; report the cutoff frequency.

    cutoff_frequency = v_s / r_c is the angular frequency where the phonon
    argument leaves the smearing Gaussian, the scale of the required spectral
    cutoff.
    """
    return {
        "bulk_ok": result.lambda_eff < consts.bulk_heating_bound,
        "cutoff_frequency": dispersion.v_s / r_c,
        "lambda_eff": result.lambda_eff,
        "bound": consts.bulk_heating_bound,
    }


def sweep(lambda0: float, r_c: float, v_s: float, betas) -> list[HeatingResult]:
    """lambda_eff over a grid of beta values at fixed (lambda0, r_c, v_s)."""
    dispersion = PhononDispersion(v_s)
    results = []
    for beta in betas:
        t_c = beta * r_c / v_s
        if t_c == 0.0:
            spectrum = NoiseSpectrum.white(lambda0, r_c)
        else:
            spectrum = NoiseSpectrum.gaussian_cutoff(lambda0, t_c, r_c)
        results.append(lambda_eff(spectrum, dispersion))
    return results
