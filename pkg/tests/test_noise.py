import numpy as np
import pytest
from scipy import integrate

from csllab.errors import ContractViolationError, ResolutionError, UnsupportedQueryError
from csllab.noise import (
    BoostedCorrelationQuery,
    NoiseKind,
    NoiseSpectrum,
    boosted_correlation,
    boosted_phase,
    correlation_time,
    embedding_length,
    frequency_gaussians,
    increment_covariance,
    sample_colored,
    sample_white,
    synthesize_increments,
)

UNIT_COLORED = NoiseSpectrum.gaussian_cutoff(1.0, 1.0, 1e-7)


# ---------------------------------------------------------------------------
# spectrum type


def test_spectrum_kind_consistency():
    with pytest.raises(ContractViolationError):
        NoiseSpectrum(1.0, 0.0, 1e-7, NoiseKind.GAUSSIAN_CUTOFF)
    with pytest.raises(ContractViolationError):
        NoiseSpectrum(1.0, 1.0, 1e-7, NoiseKind.WHITE)
    with pytest.raises(ContractViolationError):
        NoiseSpectrum(-1.0, 0.0, 1e-7, NoiseKind.WHITE)


def test_spectral_density_values():
    spec = NoiseSpectrum.gaussian_cutoff(2.0, 0.5, 1e-7)
    assert spec.spectral_density(0.0) == pytest.approx(2.0)
    assert spec.spectral_density(2.0) == pytest.approx(2.0 * np.exp(-1.0))
    white = NoiseSpectrum.white(3.0, 1e-7)
    assert white.spectral_density(1e9) == pytest.approx(3.0)


def test_dilated_spectrum():
    spec = UNIT_COLORED.dilated(1.25)
    assert spec.t_c == pytest.approx(1.25)
    assert spec.lambda0 == 1.0


# ---------------------------------------------------------------------------
# white sampling


def test_white_variance_frozen_seed():
    traj = sample_white(1, 10**6, 1e-3, seed=42)
    var = float(np.var(traj.increments[0]))
    assert abs(var - 1e-3) < 5e-6


def test_white_mean_within_standard_errors():
    traj = sample_white(4, 20_000, 0.01, seed=3)
    se = np.sqrt(0.01 / 20_000)
    assert np.abs(traj.increments.mean(axis=1)).max() < 5 * se


def test_white_channels_uncorrelated():
    n = 200_000
    traj = sample_white(2, n, 1e-3, seed=42)
    a, b = traj.increments
    rho = float(np.mean(a * b) / (a.std() * b.std()))
    assert abs(rho) < 5 / np.sqrt(n)


def test_white_determinism():
    one = sample_white(3, 1000, 1e-2, seed=77)
    two = sample_white(3, 1000, 1e-2, seed=77)
    assert np.array_equal(one.increments, two.increments)


def test_white_variance_linear_in_dt():
    dts = np.logspace(-3, -1, 7)
    variances = [np.var(sample_white(1, 400_000, float(dt), seed=5).increments) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(variances), 1)[0]
    assert abs(slope - 1.0) < 0.02


def test_white_invalid_sizes():
    with pytest.raises(ContractViolationError):
        sample_white(0, 10, 0.1, 1)
    with pytest.raises(ContractViolationError):
        sample_white(1, 10, -0.1, 1)


def test_trajectory_csv_layout():
    traj = sample_white(2, 3, 0.5, seed=1)
    lines = traj.to_csv().strip().split("\n")
    assert lines[0] == "step,channel,increment"
    assert len(lines) == 1 + 2 * 3
    assert lines[1].startswith("0,0,")


# ---------------------------------------------------------------------------
# correlation function


def test_correlation_peak_against_quadrature_oracle():
    # C(0) = (1/2pi) Integral e^{-omega^2} d omega for lambda0 = t_c = 1
    oracle, _ = integrate.quad(lambda w: np.exp(-w * w) / (2 * np.pi), -np.inf, np.inf)
    assert oracle == pytest.approx(1.0 / (2.0 * np.sqrt(np.pi)), rel=1e-10)
    assert correlation_time(UNIT_COLORED, 0.0) == pytest.approx(oracle, rel=1e-10)
    assert correlation_time(UNIT_COLORED, 0.0) == pytest.approx(0.28209, abs=5e-6)


def test_correlation_matches_quadrature_at_finite_lag():
    spec = NoiseSpectrum.gaussian_cutoff(2.5, 0.7, 1e-7)
    for tau in (0.3, 1.0, 2.2):
        oracle, _ = integrate.quad(
            lambda w: 2.5 * np.exp(-((w * 0.7) ** 2)) * np.cos(w * tau) / (2 * np.pi),
            -np.inf, np.inf,
        )
        assert correlation_time(spec, tau) == pytest.approx(oracle, rel=1e-9)


def test_correlation_even():
    rng = np.random.default_rng(0)
    for tau in rng.uniform(0, 5, size=10):
        assert correlation_time(UNIT_COLORED, tau) == correlation_time(UNIT_COLORED, -tau)


def test_correlation_integral_recovers_intensity():
    value, _ = integrate.quad(lambda t: correlation_time(UNIT_COLORED, t), -np.inf, np.inf)
    assert value == pytest.approx(1.0, abs=1e-6)


def test_correlation_white_rejected():
    with pytest.raises(UnsupportedQueryError):
        correlation_time(NoiseSpectrum.white(1.0, 1e-7), 0.0)


# ---------------------------------------------------------------------------
# increment covariance and colored sampling


def test_increment_covariance_against_double_quadrature():
    dt = 0.13
    spec = NoiseSpectrum.gaussian_cutoff(1.4, 0.8, 1e-7)
    for lag in (0, 1, 3, 7):
        oracle, _ = integrate.dblquad(
            lambda s2, s1: correlation_time(spec, lag * dt + s1 - s2),
            0.0, dt, 0.0, dt, epsabs=1e-12,
        )
        got = float(increment_covariance(spec, dt, np.array([lag]))[0])
        assert got == pytest.approx(oracle, rel=1e-9, abs=1e-15)


def test_increment_covariance_white_limits():
    white = NoiseSpectrum.white(2.0, 1e-7)
    cov = increment_covariance(white, 0.05, np.arange(4))
    assert cov[0] == pytest.approx(0.1)
    assert np.all(cov[1:] == 0.0)


def test_colored_lag_statistics():
    spec = UNIT_COLORED
    dt, n_steps, n_traj = 0.1, 2**15, 16
    rows = [
        sample_colored(spec, 1, n_steps, dt, seed=1000 + i).increments[0]
        for i in range(n_traj)
    ]
    for lag_tc in (0.0, 1.0, 2.0):
        j = int(round(lag_tc / dt))
        est = np.array([(r[: n_steps - j] * r[j:]).mean() for r in rows]) / dt**2
        se = est.std(ddof=1) / np.sqrt(n_traj)
        target = correlation_time(spec, lag_tc)
        assert abs(est.mean() - target) < 5 * se


def test_colored_distant_lag_vanishes():
    spec = UNIT_COLORED
    dt, n_steps, n_traj = 0.1, 2**15, 16
    j = int(round(10.0 / dt))
    rows = [
        sample_colored(spec, 1, n_steps, dt, seed=50 + i).increments[0] for i in range(n_traj)
    ]
    est = np.array([(r[: n_steps - j] * r[j:]).mean() for r in rows]) / dt**2
    se = est.std(ddof=1) / np.sqrt(n_traj)
    assert abs(est.mean()) < 5 * se


def test_colored_near_white_limit():
    dt = 0.1
    spec = NoiseSpectrum.gaussian_cutoff(1.0, dt / 100.0, 1e-7)
    traj = sample_colored(spec, 8, 4096, dt, seed=9, allow_coarse=True)
    assert np.var(traj.increments) / dt == pytest.approx(1.0, abs=0.1)


def test_colored_resolution_guard():
    with pytest.raises(ResolutionError):
        sample_colored(UNIT_COLORED, 1, 100, 0.3, seed=1)
    sample_colored(UNIT_COLORED, 1, 100, 0.3, seed=1, allow_coarse=True)


def test_colored_determinism_and_channel_independence():
    one = sample_colored(UNIT_COLORED, 2, 4096, 0.1, seed=31)
    two = sample_colored(UNIT_COLORED, 2, 4096, 0.1, seed=31)
    assert np.array_equal(one.increments, two.increments)
    a, b = one.increments
    rho = np.mean(a * b) / (a.std() * b.std())
    assert abs(rho) < 5 / np.sqrt(4096 / 10)  # ~decorrelated samples per row


def test_shared_frequency_gaussians_reproduce_sample_colored():
    # sample_colored is exactly the synthesis pipeline with its own zeta
    spec = UNIT_COLORED
    n_steps, dt, seed = 2048, 0.1, 12
    n_fft = embedding_length(n_steps, spec.t_c, dt)
    zeta = frequency_gaussians(1, n_fft // 2 + 1, seed)
    manual = synthesize_increments(spec, zeta, dt, n_steps, n_fft)
    auto = sample_colored(spec, 1, n_steps, dt, seed)
    assert np.array_equal(manual, auto.increments)


# ---------------------------------------------------------------------------
# boosted correlation


def query(v=0.0, dx=0.0, perp=(0.0, 0.0), dt=0.0):
    return BoostedCorrelationQuery(v=v, delta_x_parallel=dx, delta_x_perp=perp, delta_t=dt)


def test_boosted_phase_identity_at_rest():
    # dyadic inputs make every product and partial sum exactly representable,
    # so the v = 0 reduction to i(q.dx - omega dt) holds bit-for-bit
    q = query(v=0.0, dx=2.0, perp=(0.5, -0.25), dt=4.0)
    got = boosted_phase(q, q_parallel=1.5, q_perp=(2.0, 8.0), omega=0.125)
    expected = 1j * (2.0 * 0.5 + 8.0 * -0.25 + 1.5 * 2.0 - 0.125 * 4.0)
    assert got == expected  # exact, not approximate


def test_boosted_phase_rest_reduction_generic():
    q = query(v=0.0, dx=2e-7, perp=(1e-7, -3e-8), dt=0.4)
    got = boosted_phase(q, q_parallel=3e6, q_perp=(1e6, 2e6), omega=1.5)
    expected = 1j * (3e6 * 2e-7 + 1e6 * 1e-7 + 2e6 * -3e-8 - 1.5 * 0.4)
    assert got == pytest.approx(expected, rel=1e-14)


def test_boosted_phase_pure_time_dilation():
    # dx = 0, q = 0: the temporal phase picks up exactly one factor of gamma
    q = query(v=0.6 * 299792458.0, dx=0.0, perp=(0.0, 0.0), dt=0.8)
    got = boosted_phase(q, q_parallel=0.0, q_perp=(0.0, 0.0), omega=2.0)
    assert got == pytest.approx(-1j * 1.25 * 2.0 * 0.8, rel=1e-12)


def test_boosted_phase_gamma_prefactor():
    q = query(v=0.6 * 299792458.0, dx=1.0, dt=0.0)
    base = boosted_phase(query(v=0.0, dx=1.0), 2.0, (0.0, 0.0), 0.0)
    got = boosted_phase(q, 2.0, (0.0, 0.0), 0.0)
    assert got.imag / base.imag == pytest.approx(1.25, rel=1e-12)


def test_boosted_phase_rejects_superluminal():
    with pytest.raises(ContractViolationError):
        query(v=3e8)


def test_boosted_correlation_peak_value():
    spec = NoiseSpectrum.gaussian_cutoff(2.0, 0.5, 1e-7)
    got = boosted_correlation(spec, query())
    expected = 2.0 / (2 * np.sqrt(np.pi) * 0.5) / (8 * np.pi**1.5 * (1e-7) ** 3)
    assert got == pytest.approx(expected, rel=1e-12)


def test_boosted_correlation_rest_factorizes():
    spec = NoiseSpectrum.gaussian_cutoff(1.0, 0.5, 2e-7)
    dx, perp, dt = 1.5e-7, (1e-7, 0.5e-7), 0.3
    got = boosted_correlation(spec, query(dx=dx, perp=perp, dt=dt))
    space2 = dx**2 + perp[0] ** 2 + perp[1] ** 2
    expected = (
        1.0
        / (2 * np.sqrt(np.pi) * 0.5) * np.exp(-(dt**2) / (4 * 0.25))
        / (8 * np.pi**1.5 * (2e-7) ** 3) * np.exp(-space2 / (4 * (2e-7) ** 2))
    )
    assert got == pytest.approx(expected, rel=1e-12)


def test_boosted_correlation_reflection_symmetry():
    spec = NoiseSpectrum.gaussian_cutoff(1.0, 0.4, 1e-7)
    rng = np.random.default_rng(8)
    for _ in range(10):
        dx = float(rng.uniform(-3e-7, 3e-7))
        perp = (float(rng.uniform(-2e-7, 2e-7)), float(rng.uniform(-2e-7, 2e-7)))
        dt = float(rng.uniform(-1, 1))
        v = float(rng.uniform(0, 1e6))
        plus = boosted_correlation(spec, query(v=v, dx=dx, perp=perp, dt=dt))
        minus = boosted_correlation(
            spec, query(v=v, dx=-dx, perp=(-perp[0], -perp[1]), dt=-dt)
        )
        assert plus == pytest.approx(minus, rel=1e-12)


def test_boosted_correlation_depends_on_frame():
    spec = NoiseSpectrum.gaussian_cutoff(1.0, 0.4, 1e-7)
    at_rest = boosted_correlation(spec, query(v=0.0, dx=1e-7, dt=0.3))
    boosted = boosted_correlation(spec, query(v=1e5, dx=1e-7, dt=0.3))
    assert abs(boosted - at_rest) / at_rest > 1e-6


def test_boosted_correlation_against_quadrature_oracle():
    # integrate exp(-omega^2 t_c^2 - |q|^2 r_c^2 + phase) with Gauss-Hermite
    # nodes, building the phase from boosted_phase itself.  Scales are chosen
    # relativistically fat (r_c comparable to c t_c) so every term of the
    # boosted exponent contributes at O(1) and the nodes resolve the phase.
    spec = NoiseSpectrum.gaussian_cutoff(1.3, 2e-9, 0.5)
    q = query(v=0.6 * 299792458.0, dx=0.8, perp=(0.3, -0.4), dt=1.5e-9)
    nodes, weights = np.polynomial.hermite.hermgauss(64)
    t_c, r_c = spec.t_c, spec.r_c

    def axis_sum(scale, coeff):
        # Integral e^{-(x s)^2} e^{i c x} dx via GH in u = x s
        return (weights * np.exp(1j * coeff * nodes / scale)).sum() / scale

    # linear coefficients of the exponent, read off through boosted_phase
    co_q = boosted_phase(q, 1.0, (0.0, 0.0), 0.0).imag
    co_om = boosted_phase(q, 0.0, (0.0, 0.0), 1.0).imag
    co_p1 = boosted_phase(q, 0.0, (1.0, 0.0), 0.0).imag
    co_p2 = boosted_phase(q, 0.0, (0.0, 1.0), 0.0).imag
    assert co_q / (2 * r_c) < 5 and co_om / (2 * t_c) < 5  # GH resolvable

    integral = (
        axis_sum(t_c, co_om)
        * axis_sum(r_c, co_q)
        * axis_sum(r_c, co_p1)
        * axis_sum(r_c, co_p2)
    )
    oracle = spec.lambda0 * integral.real / (2 * np.pi) ** 4
    assert boosted_correlation(spec, q) == pytest.approx(oracle, rel=1e-9)
