"""White and colored noise generation plus correlation-function evaluation.

The colored generator synthesizes stationary Gaussian *integrated increments*
dW_n = integral of the noise over one output step.  Synthesis is circulant
embedding in time: the closed-form increment covariance is laid out on a
circular grid, its FFT gives the spectral weights, and one inverse real FFT of
weighted frequency-domain Gaussians yields a trajectory.  The weights are an
analytic function of the spectrum, so two spectra can be driven by the same
frequency-domain random numbers (used by the boosted-frame comparison).

Spectrum convention: lambda(omega) = lambda0 * exp(-(omega*t_c)^2), and the
stationary covariance of the underlying noise is
C(tau) = lambda0 / (2 sqrt(pi) t_c) * exp(-tau^2 / (4 t_c^2)),
whose integral over all lags is lambda0 (the white-equivalent intensity).
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len
from scipy.special import erf

from .constants import constants
from .errors import (
    ContractViolationError,
    ResolutionError,
    UnsupportedQueryError,
)
from .rng import generator


class NoiseKind(enum.Enum):
    WHITE = "white"
    GAUSSIAN_CUTOFF = "gaussian_cutoff"


@dataclass(frozen=True)
class NoiseSpectrum:
    """Two-parameter noise model: intensity, correlation time, correlation length."""

    lambda0: float
    t_c: float
    r_c: float
    kind: NoiseKind

    def __post_init__(self):
        if self.lambda0 <= 0:
            raise ContractViolationError("lambda0 must be positive")
        if self.r_c <= 0:
            raise ContractViolationError("r_c must be positive")
        if self.t_c < 0:
            raise ContractViolationError("t_c must be non-negative")
        if (self.kind == NoiseKind.WHITE) != (self.t_c == 0.0):
            raise ContractViolationError("white spectrum iff t_c == 0")

    @staticmethod
    def white(lambda0: float, r_c: float) -> "NoiseSpectrum":
        return NoiseSpectrum(lambda0, 0.0, r_c, NoiseKind.WHITE)

    @staticmethod
    def gaussian_cutoff(lambda0: float, t_c: float, r_c: float) -> "NoiseSpectrum":
        return NoiseSpectrum(lambda0, t_c, r_c, NoiseKind.GAUSSIAN_CUTOFF)

    def spectral_density(self, omega) -> np.ndarray:
        """lambda(omega); flat for white noise."""
        om = np.asarray(omega, dtype=float)
        if self.kind == NoiseKind.WHITE:
            return np.full_like(om, self.lambda0)
        return self.lambda0 * np.exp(-(om * self.t_c) ** 2)

    def dilated(self, gamma: float) -> "NoiseSpectrum":
        """Spectrum seen from a boosted frame: omega -> gamma*omega, i.e. t_c -> gamma*t_c."""
        if self.kind == NoiseKind.WHITE:
            return self
        return NoiseSpectrum(self.lambda0, gamma * self.t_c, self.r_c, self.kind)


@dataclass(frozen=True)
class NoiseTrajectory:
    """Discretized increments, one row per channel."""

    n_channels: int
    n_steps: int
    dt: float
    increments: np.ndarray  # shape (n_channels, n_steps)
    seed: int
    kind: NoiseKind

    def __post_init__(self):
        inc = np.asarray(self.increments, dtype=float)
        if inc.shape != (self.n_channels, self.n_steps):
            raise ContractViolationError("increment array shape mismatch")
        inc = inc.copy()
        inc.setflags(write=False)
        object.__setattr__(self, "increments", inc)

    def to_csv(self) -> str:
        """Long-format export: step, channel, increment."""
        buf = io.StringIO()
        buf.write("step,channel,increment\n")
        for ch in range(self.n_channels):
            row = self.increments[ch]
            for step in range(self.n_steps):
                buf.write(f"{step},{ch},{row[step]:.17g}\n")
        return buf.getvalue()


def sample_white(n_channels: int, n_steps: int, dt: float, seed: int) -> NoiseTrajectory:
    """I.i.d. Gaussian increments, mean 0, variance dt, independent channels.

    One Philox stream keyed by `seed` fills the (n_channels, n_steps) array
    row-major; bit-reproducible across platforms.
    """
    if n_channels < 1 or n_steps < 1:
        raise ContractViolationError("n_channels and n_steps must be >= 1")
    if dt <= 0:
        raise ContractViolationError("dt must be positive")
    rng = generator(seed)
    inc = rng.standard_normal((n_channels, n_steps)) * np.sqrt(dt)
    return NoiseTrajectory(n_channels, n_steps, dt, inc, seed, NoiseKind.WHITE)


def correlation_time(spectrum: NoiseSpectrum, tau) -> np.ndarray | float:
    """Stationary covariance C(tau) of the colored noise, closed form.

    C(tau) = (1/2pi) * Integral d omega lambda(omega) e^{-i omega tau}
           = lambda0 / (2 sqrt(pi) t_c) * exp(-tau^2/(4 t_c^2)).
    """
    if spectrum.kind == NoiseKind.WHITE:
        raise UnsupportedQueryError(
            "white-noise correlation is the distribution lambda0*delta(tau), not a "
            "pointwise function; use increment variance lambda0*dt instead"
        )
    t = np.asarray(tau, dtype=float)
    out = spectrum.lambda0 / (2.0 * np.sqrt(np.pi) * spectrum.t_c) * np.exp(
        -(t / (2.0 * spectrum.t_c)) ** 2
    )
    return float(out) if np.isscalar(tau) else out


def increment_covariance(spectrum: NoiseSpectrum, dt: float, lags) -> np.ndarray:
    """Cov(dW_0, dW_j) of integrated increments on a grid of spacing dt.

    Closed form from the double window integral of C; written as erf/exp
    second differences that hit exact zeros at large lag (no cancellation).
    For white noise this reduces to lambda0*dt at lag 0 and 0 elsewhere.
    """
    j = np.asarray(lags, dtype=float)
    lam0 = spectrum.lambda0
    if spectrum.kind == NoiseKind.WHITE:
        return np.where(j == 0, lam0 * dt, 0.0)
    t_c = spectrum.t_c
    tau = j * dt

    def psi(x):
        return np.sqrt(np.pi) * t_c * erf(x / (2.0 * t_c))

    def gauss(x):
        return np.exp(-(x / (2.0 * t_c)) ** 2)

    amp = lam0 / (2.0 * np.sqrt(np.pi) * t_c)
    term = (
        dt * (psi(tau + dt) - psi(tau - dt))
        + tau * (psi(tau + dt) - 2.0 * psi(tau) + psi(tau - dt))
        + 2.0 * t_c**2 * (gauss(tau + dt) - 2.0 * gauss(tau) + gauss(tau - dt))
    )
    return amp * term


def embedding_length(n_steps: int, t_c: float, dt: float) -> int:
    """FFT length: requested steps plus padding to decorrelate the circular wrap."""
    pad = int(np.ceil(10.0 * t_c / dt)) if t_c > 0 else 0
    n = next_fast_len(n_steps + pad, real=True)
    while n % 2:
        n = next_fast_len(n + 1, real=True)
    return n


def spectral_weights(spectrum: NoiseSpectrum, dt: float, n_fft: int) -> np.ndarray:
    """Circulant amplitude weights A_k (rfft layout) for increment synthesis.

    A_k = sqrt(n_fft * s_k) with s_k the FFT of the circularized increment
    covariance; roundoff-negative eigenvalues are clipped at zero.
    """
    j = np.arange(n_fft)
    dist = np.minimum(j, n_fft - j)
    r_circ = increment_covariance(spectrum, dt, dist)
    s = np.fft.rfft(r_circ).real
    return np.sqrt(np.clip(s, 0.0, None) * n_fft)


def frequency_gaussians(n_channels: int, n_half: int, seed: int) -> np.ndarray:
    """Standard complex Gaussians in rfft layout, unit expected |zeta_k|^2.

    Drawing order (documented for reproducibility): one Philox stream keyed by
    `seed` emits a (n_channels, 2, n_half) block; per channel, row 0 is the
    real parts and row 1 the imaginary parts.  Endpoints (DC and Nyquist) keep
    only their real part at unit variance.
    """
    rng = generator(seed)
    ab = rng.standard_normal((n_channels, 2, n_half))
    zeta = (ab[:, 0, :] + 1j * ab[:, 1, :]) / np.sqrt(2.0)
    zeta[:, 0] = ab[:, 0, 0]
    zeta[:, -1] = ab[:, 0, -1]
    return zeta


def synthesize_increments(
    spectrum: NoiseSpectrum, zeta: np.ndarray, dt: float, n_steps: int, n_fft: int
) -> np.ndarray:
    """Inverse-FFT synthesis of increment rows from frequency-domain Gaussians."""
    if zeta.shape[-1] != n_fft // 2 + 1:
        raise ContractViolationError("zeta length does not match n_fft")
    weights = spectral_weights(spectrum, dt, n_fft)
    return np.fft.irfft(weights * zeta, n=n_fft, axis=-1)[:, :n_steps]


def sample_colored(
    spectrum: NoiseSpectrum,
    n_channels: int,
    n_steps: int,
    dt: float,
    seed: int,
    allow_coarse: bool = False,
) -> NoiseTrajectory:
    """Stationary colored increments per channel, deterministic per seed.

    Requires dt < t_c/4 so trajectories resolve the correlation time; pass
    allow_coarse=True to lift the guard (the circulant weights integrate the
    spectrum exactly at any dt, e.g. for near-white-limit checks).
    """
    if spectrum.kind != NoiseKind.GAUSSIAN_CUTOFF:
        raise UnsupportedQueryError("colored sampling requires a Gaussian-cutoff spectrum")
    if n_channels < 1 or n_steps < 1:
        raise ContractViolationError("n_channels and n_steps must be >= 1")
    if dt <= 0:
        raise ContractViolationError("dt must be positive")
    if dt >= spectrum.t_c / 4.0 and not allow_coarse:
        raise ResolutionError(
            f"dt = {dt} does not resolve the correlation time t_c = {spectrum.t_c}; "
            "need dt < t_c/4 (or allow_coarse=True)"
        )
    n_fft = embedding_length(n_steps, spectrum.t_c, dt)
    zeta = frequency_gaussians(n_channels, n_fft // 2 + 1, seed)
    inc = synthesize_increments(spectrum, zeta, dt, n_steps, n_fft)
    return NoiseTrajectory(n_channels, n_steps, dt, inc, seed, NoiseKind.GAUSSIAN_CUTOFF)


@dataclass(frozen=True)
class BoostedCorrelationQuery:
    """Separation of two spacetime points as seen in a frame boosted along x.

    v is the boost speed, delta_x_parallel the separation along the boost
    axis, delta_x_perp the two transverse components, delta_t the time lag.
    """

    v: float
    delta_x_parallel: float
    delta_x_perp: tuple[float, float]
    delta_t: float

    def __post_init__(self):
        if abs(self.v) >= constants().c:
            raise ContractViolationError(f"|v| = {abs(self.v)} must be below c")

    @property
    def gamma(self) -> float:
        beta = self.v / constants().c
        return 1.0 / np.sqrt(1.0 - beta * beta)


def boosted_phase(
    query: BoostedCorrelationQuery,
    q_parallel: float,
    q_perp: tuple[float, float],
    omega: float,
) -> complex:
    """Complex phase exponent of the correlation integrand in the boosted frame.

    i q_perp . dx_perp + i gamma [ (q + omega v/c^2) dx - (omega + q v) dt ].
    At v = 0 this is exactly the isotropic-frame exponent i(q.dx - omega dt).
    """
    c = constants().c
    gamma = query.gamma
    perp = q_perp[0] * query.delta_x_perp[0] + q_perp[1] * query.delta_x_perp[1]
    parallel = (q_parallel + omega * query.v / c**2) * query.delta_x_parallel
    temporal = (omega + q_parallel * query.v) * query.delta_t
    return 1j * (perp + gamma * (parallel - temporal))


def boosted_correlation(spectrum: NoiseSpectrum, query: BoostedCorrelationQuery) -> float:
    """Noise correlation at the queried separation, seen from the boosted frame.

    The four Gaussian integrals close analytically; at v = 0 the result is the
    product of the temporal closed form and the spatial smearing Gaussian
    exp(-|dx|^2/(4 r_c^2)) / (8 pi^{3/2} r_c^3), scaled by lambda0.

    Normalization convention: the overall constant (written as a
    proportionality in the two-parameter correlation) is fixed so that the
    v = 0, t_c -> 0 limit reproduces white noise with the standard smearing
    weight; this is a documented choice, not a quoted value.
    """
    if spectrum.kind != NoiseKind.GAUSSIAN_CUTOFF:
        raise UnsupportedQueryError("boosted correlation requires a Gaussian-cutoff spectrum")
    c = constants().c
    gamma = query.gamma
    t_c, r_c, lam0 = spectrum.t_c, spectrum.r_c, spectrum.lambda0
    # completing the (omega, q_parallel) Gaussian integrals leaves the
    # inverse-transformed separations
    alpha = gamma * (query.delta_x_parallel - query.v * query.delta_t)
    beta = gamma * (query.v * query.delta_x_parallel / c**2 - query.delta_t)
    perp2 = query.delta_x_perp[0] ** 2 + query.delta_x_perp[1] ** 2
    temporal = np.exp(-(beta / (2.0 * t_c)) ** 2) / (2.0 * np.sqrt(np.pi) * t_c)
    parallel = np.exp(-(alpha / (2.0 * r_c)) ** 2) / (2.0 * np.sqrt(np.pi) * r_c)
    transverse = np.exp(-perp2 / (4.0 * r_c**2)) / (4.0 * np.pi * r_c**2)
    return float(lam0 * temporal * parallel * transverse)
