"""Conditional excitation amplitude for a spherical wave hitting a localized atom.

The amplitude for the emitted particle to come out as a plane wave along
k_hat, given that an atom at position a was excited, is (constants dropped)

  f(k_hat) = Integral d^3R (1/R) exp[i k R (1 - k_hat . R_hat)] V(R),

with V a transition envelope localized near the atom.  V is modeled as a
Gaussian of width sigma centered on a.  `amplitude_exact` integrates the form
above; `amplitude_approx` replaces R_hat by a_hat in the phase, the
localization approximation whose validity the tests quantify.  The squared
amplitude is collimated around a_hat: excitation is likely only inside a
narrow cone about the emitter-to-atom axis, which is what makes straight
tracks out of spherical waves.

Quadrature: product Gauss-Legendre in (R, cos theta_R) with a uniform
periodic azimuth grid, polar axis along a_hat, nodes windowed onto the
envelope support.  The radial factor oscillates at wavenumber
k (1 - k_hat . R_hat); node spacing must resolve it, and every public result
passes a doubling check (relative change < CONVERGENCE_RTOL, at most two
refinements) before it is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, QuadratureError

CONVERGENCE_RTOL = 1e-3
SUPPORT_SIGMAS = 8.0  # envelope support half-width used for integration windows


@dataclass(frozen=True)
class QuadratureSpec:
    radial_points: int = 256
    angular_points: int = 64
    r_max: float = 1.5  # integration ball radius, in units of (|a| + sigma)

    def __post_init__(self):
        if self.radial_points < 32 or self.angular_points < 32:
            raise ContractViolationError("quadrature needs at least 32 points per axis")
        if self.r_max <= 1.0:
            raise ContractViolationError("r_max multiplier must exceed 1")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.radial_points, 2 * self.angular_points, self.r_max)


@dataclass(frozen=True)
class MottConfig:
    """Geometry of one emitter/atom arrangement.

    k: wavenumber (m^-1); a: atom position (3-vector, m); sigma: envelope
    width (m).  The atom must sit well off the emitter: |a| > 3 sigma.
    """

    k: float
    a: tuple[float, float, float]
    sigma: float
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.k <= 0:
            raise ContractViolationError("wavenumber k must be positive")
        if self.sigma <= 0:
            raise ContractViolationError("sigma must be positive")
        if self.a_len <= 3.0 * self.sigma:
            raise ContractViolationError("|a| must exceed 3 sigma")

    @property
    def a_vec(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)

    @property
    def a_len(self) -> float:
        return float(np.linalg.norm(np.asarray(self.a, dtype=float)))

    @property
    def a_hat(self) -> np.ndarray:
        return self.a_vec / self.a_len

    def amplitude_scale(self) -> float:
        """Rough magnitude of the peak amplitude, for absolute floors."""
        return (2.0 * np.pi) ** 1.5 * self.sigma**3 / self.a_len


def v0s_model(config: MottConfig, r_vec) -> float:
    """Gaussian transition envelope exp(-|R - a|^2 / (2 sigma^2)), peak 1 at the atom."""
    d = np.asarray(r_vec, dtype=float) - config.a_vec
    return float(np.exp(-float(d @ d) / (2.0 * config.sigma**2)))


def _axis_frame(a_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors orthogonal to a_hat."""
    helper = np.array([1.0, 0.0, 0.0])
    if abs(a_hat @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(a_hat, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(a_hat, e1)


def _grid_nodes(config: MottConfig, spec: QuadratureSpec):
    """Windowed product nodes (R, u, phi) and combined weights.

    The envelope bounds the polar support through
    |R - a|^2 >= a^2 (1 - u^2) ~ 2 a^2 (1 - u), so the polar nodes are placed
    in the scaled variable xi = (1 - u) a^2 / sigma^2, where the integrand
    decays like exp(-xi); a plain cos(theta) grid would waste nearly all its
    nodes outside the support.
    """
    a_len, sigma = config.a_len, config.sigma
    half = SUPPORT_SIGMAS * sigma
    r_lo = max(1e-6 * sigma, a_len - half)
    r_hi = min(spec.r_max * (a_len + sigma), a_len + half)
    rn, rw = np.polynomial.legendre.leggauss(spec.radial_points)
    radii = 0.5 * (r_hi - r_lo) * rn + 0.5 * (r_hi + r_lo)
    r_weights = 0.5 * (r_hi - r_lo) * rw

    angular_scale = sigma**2 / a_len**2
    xi_max = min(2.0 / angular_scale, SUPPORT_SIGMAS**2)
    xn, xw = np.polynomial.legendre.leggauss(spec.angular_points)
    xi = 0.5 * xi_max * (xn + 1.0)
    u = 1.0 - angular_scale * xi
    u_weights = 0.5 * xi_max * angular_scale * xw

    phi = 2.0 * np.pi * np.arange(spec.angular_points) / spec.angular_points
    phi_weight = 2.0 * np.pi / spec.angular_points
    return radii, r_weights, u, u_weights, phi, phi_weight


def _integrate(config: MottConfig, k_hat: np.ndarray, spec: QuadratureSpec,
               use_a_hat_phase: bool) -> complex:
    """One evaluation of the conditional amplitude on a fixed product grid.

    The radial axis is processed in slabs to bound peak memory on refined grids.
    """
    a_hat = config.a_hat
    e1, e2 = _axis_frame(a_hat)
    radii, r_w, u, u_w, phi, phi_w = _grid_nodes(config, spec)

    U = u[None, :, None]
    PHI = phi[None, None, :]
    sin_t = np.sqrt(np.clip(1.0 - U * U, 0.0, None))
    # R_hat resolved in the (e1, e2, a_hat) frame
    comp1 = sin_t * np.cos(PHI)
    comp2 = sin_t * np.sin(PHI)
    k1, k2, k3 = float(k_hat @ e1), float(k_hat @ e2), float(k_hat @ a_hat)
    angular_weight = u_w[None, :, None] * phi_w

    total = 0.0 + 0.0j
    for lo in range(0, radii.size, 64):
        R = radii[lo : lo + 64, None, None]
        if use_a_hat_phase:
            # R_hat -> a_hat, and k_hat . a_hat = k3; keep the azimuth axis
            # materialized so the phi sum is taken over all its nodes
            k_dot_rhat = np.full_like(comp1, k3)
        else:
            k_dot_rhat = k1 * comp1 + k2 * comp2 + k3 * U
        # envelope needs |R_vec - a|^2 = R^2 + a^2 - 2 R a (R_hat . a_hat)
        dist2 = R * R + config.a_len**2 - 2.0 * R * config.a_len * U
        envelope = np.exp(-dist2 / (2.0 * config.sigma**2))
        integrand = R * np.exp(1j * config.k * R * (1.0 - k_dot_rhat)) * envelope
        slab = (integrand * angular_weight).sum(axis=(1, 2))
        total += complex((slab * r_w[lo : lo + 64]).sum())
    return total


def _converged_amplitude(config: MottConfig, k_hat, use_a_hat_phase: bool) -> complex:
    k_hat = np.asarray(k_hat, dtype=float)
    if abs(np.linalg.norm(k_hat) - 1.0) > 1e-9:
        raise ContractViolationError("k_hat must be a unit vector")
    floor = 1e-9 * config.amplitude_scale()
    spec = config.quadrature
    results = [_integrate(config, k_hat, spec, use_a_hat_phase)]
    for _ in range(2):
        spec = spec.doubled()
        results.append(_integrate(config, k_hat, spec, use_a_hat_phase))
        if abs(results[-1] - results[-2]) < CONVERGENCE_RTOL * max(abs(results[-1]), floor):
            return results[-1]
    raise QuadratureError(
        f"amplitude not converged after two refinements: last change "
        f"{abs(results[-1] - results[-2]):.3e} vs |f| = {abs(results[-1]):.3e}; node "
        f"spacing must resolve oscillation wavenumber k(1 - k_hat.R_hat) <= {2 * config.k:.3e}"
    )


def amplitude_exact(config: MottConfig, k_hat) -> complex:
    """Conditional amplitude with the full spherical-wave phase."""
    return _converged_amplitude(config, k_hat, use_a_hat_phase=False)


def amplitude_approx(config: MottConfig, k_hat) -> complex:
    """Conditional amplitude with the localization substitution R_hat -> a_hat."""
    return _converged_amplitude(config, k_hat, use_a_hat_phase=True)


def _approx_radial(config: MottConfig, cos_theta: np.ndarray, n_radial: int) -> np.ndarray:
    """Approximate-form amplitudes on a cos(theta) grid via the exact angular reduction.

    With the phase independent of R_hat, the solid-angle integral of the
    envelope closes analytically and only the radial integral remains; this is
    the same integral as `amplitude_approx`, evaluated with one radial
    quadrature per angle.
    """
    a_len, sigma = config.a_len, config.sigma
    half = SUPPORT_SIGMAS * sigma
    r_lo = max(1e-6 * sigma, a_len - half)
    r_hi = a_len + half
    rn, rw = np.polynomial.legendre.leggauss(n_radial)
    radii = 0.5 * (r_hi - r_lo) * rn + 0.5 * (r_hi + r_lo)
    weights = 0.5 * (r_hi - r_lo) * rw
    shell = (2.0 * np.pi * sigma**2 / a_len) * (
        np.exp(-((radii - a_len) ** 2) / (2.0 * sigma**2))
        - np.exp(-((radii + a_len) ** 2) / (2.0 * sigma**2))
    )
    phases = np.exp(1j * config.k * np.outer(1.0 - np.asarray(cos_theta), radii))
    return phases @ (weights * shell)


@dataclass(frozen=True)
class AngularProfile:
    """Peak-normalized |f|^2 on a cos(theta) grid; maximum at the point nearest 1."""

    cos_theta: np.ndarray
    intensity: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cos_theta, dtype=float)
        i = np.asarray(self.intensity, dtype=float)
        if c.shape != i.shape or c.ndim != 1:
            raise ContractViolationError("profile arrays must be matching 1-d grids")
        if i.min() < 0.0 or i.max() > 1.0 + 1e-12:
            raise ContractViolationError("profile intensities must lie in [0, 1]")
        nearest_one = int(np.argmin(np.abs(c - 1.0)))
        if int(np.argmax(i)) != nearest_one:
            raise ContractViolationError("profile must peak at the grid point nearest 1")
        object.__setattr__(self, "cos_theta", c)
        object.__setattr__(self, "intensity", i)

    def half_width(self) -> float:
        """Cone half-width in (1 - cos theta) where the profile first falls to 1/2."""
        order = np.argsort(-self.cos_theta)  # from cos=1 downward
        c, i = self.cos_theta[order], self.intensity[order]
        below = np.nonzero(i < 0.5)[0]
        if below.size == 0:
            raise QuadratureError("profile never falls below half maximum; widen the grid")
        j = below[0]
        frac = (i[j - 1] - 0.5) / (i[j - 1] - i[j])
        crossing = c[j - 1] + frac * (c[j] - c[j - 1])
        return 1.0 - crossing

    def to_csv(self) -> str:
        lines = ["cos_theta,intensity"]
        for c, i in zip(self.cos_theta, self.intensity):
            lines.append(f"{c:.17g},{i:.17g}")
        return "\n".join(lines) + "\n"


def angular_profile(config: MottConfig, n_angles: int) -> AngularProfile:
    """Peak-normalized |f|^2 over cos(theta) in [-1, 1], localization form.

    Uses the radial reduction of the approximate amplitude with a doubling
    convergence check over the whole grid.
    """
    if n_angles < 16:
        raise ContractViolationError("n_angles must be >= 16")
    grid = np.linspace(-1.0, 1.0, n_angles)
    n_r = config.quadrature.radial_points
    values = _approx_radial(config, grid, n_r)
    for _ in range(2):
        finer = _approx_radial(config, grid, 2 * n_r)
        scale = np.abs(finer).max()
        if np.abs(finer - values).max() < CONVERGENCE_RTOL * scale:
            values = finer
            break
        n_r *= 2
        values = finer
    else:
        raise QuadratureError("angular profile failed the doubling check after two refinements")
    intensity = np.abs(values) ** 2
    return AngularProfile(grid, intensity / intensity.max())
