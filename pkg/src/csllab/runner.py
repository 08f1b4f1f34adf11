"""Execute a validated RunConfig and render its artifact files.

Every run produces deterministic text artifacts: CSV files for bulk numeric
series and a summary.json.  Nothing here embeds wall-clock time or machine
identity, so identical (config, seed) pairs yield byte-identical files; the
manifest written by the CLI is the only place a timestamp appears.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, serialize_config
from .constants import constants
from .dynamics import (
    UNDECIDED,
    CSLConfig,
    effective_coupling,
    run_ensemble,
    run_trajectory,
)
from .errors import ConfigError
from .heating import PhononDispersion, bound_check, lambda_eff, sweep
from .hilbert import DenseOperator, StateVector
from .mott import MottConfig, QuadratureSpec, amplitude_approx, amplitude_exact, angular_profile
from .noise import NoiseSpectrum, NoiseTrajectory, increment_covariance, sample_colored, sample_white
from .relativity import Boost, Event, effective_velocity, min_inversion_boost, time_order
from .rng import derive_seed
from .scenarios import EPRSetup, FrameComparison, frame_experiment, run_epr_ensemble


@dataclass(frozen=True)
class RunResult:
    files: dict[str, str]
    summary: dict


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def config_digest(config: RunConfig) -> str:
    """Stable hash of the normalized config document plus the seed."""
    canonical = serialize_config(config)
    return hashlib.sha256(canonical.encode()).hexdigest()


def execute(config: RunConfig) -> RunResult:
    runner = _RUNNERS[config.subcommand]
    files, summary = runner(config.params, config.seed)
    summary = {
        "subcommand": config.subcommand,
        "seed": config.seed,
        "config_digest": config_digest(config),
        **summary,
    }
    files["summary.json"] = _json(summary)
    return RunResult(files=files, summary=summary)


# ---------------------------------------------------------------------------


def _collapse_spectrum(params) -> NoiseSpectrum | None:
    if params["noise_kind"] == "white":
        return None
    if params["t_c"] <= 0:
        raise ConfigError("gaussian_cutoff noise requires t_c > 0")
    return NoiseSpectrum.gaussian_cutoff(1.0, params["t_c"], params["r_c"])


def _run_collapse(params, seed):
    probs = np.asarray(params["initial_probabilities"], dtype=float)
    eigs = params["m_eigenvalues"]
    if len(eigs) != probs.size:
        raise ConfigError("initial_probabilities and m_eigenvalues must have equal length")
    if probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-9:
        raise ConfigError("initial_probabilities must be non-negative and sum to 1")
    gamma = params["gamma_override"]
    if gamma is None:
        gamma = effective_coupling(params["lambda0"], params["r_c"])
    cfg = CSLConfig(
        collapse_ops=[DenseOperator.diagonal(eigs)],
        gamma_csl=gamma,
        dt=params["dt"],
        n_steps_max=params["n_steps_max"],
        collapse_threshold=params["threshold"],
    )
    psi0 = StateVector(np.sqrt(probs).astype(complex))
    chunk = 1024 if params["noise_kind"] == "white" else 256  # colored pregenerates noise
    stats = run_ensemble(cfg, psi0, _collapse_spectrum(params), params["trajectories"],
                         seed, chunk_size=chunk)

    out = io.StringIO()
    out.write("trajectory,outcome,collapse_steps,collapse_time\n")
    for i in range(stats.n_traj):
        steps = int(stats.collapse_steps[i])
        t = _fmt(steps * cfg.dt) if steps >= 0 else ""
        out.write(f"{i},{int(stats.outcomes[i])},{steps},{t}\n")

    trace = io.StringIO()
    trace.write("trajectory,time,m0,norm_drift\n")
    for i in range(min(params["trace_trajectories"], stats.n_traj)):
        record = run_trajectory(cfg, psi0, _collapse_spectrum(params),
                                derive_seed(seed, i), record_traces=True)
        for n, t in enumerate(record.times):
            drift = record.norm_defect_trace[n]
            trace.write(f"{i},{_fmt(t)},{_fmt(record.observable_traces[0][n])},{_fmt(drift)}\n")

    summary = {
        "trajectories": stats.n_traj,
        "outcome_counts": {str(k): v for k, v in sorted(stats.outcome_counts.items())},
        "frequencies": {
            str(k): v / stats.n_traj for k, v in sorted(stats.outcome_counts.items())
        },
        "born_probabilities": {str(k): v for k, v in sorted(stats.born_probabilities.items())},
        "mean_collapse_time": stats.mean_collapse_time,
        "norm_drift_max": stats.norm_drift_max,
        "undecided": stats.outcome_counts.get(UNDECIDED, 0),
        "gamma_csl": gamma,
    }
    return {"outcomes.csv": out.getvalue(), "trace.csv": trace.getvalue()}, summary


def _run_epr(params, seed):
    setup = EPRSetup(
        apparatus_mass_gap=params["apparatus_mass_gap"],
        gamma=params["gamma"],
        dt=params["dt"],
        n_steps_max=params["n_steps_max"],
        threshold=params["threshold"],
    )
    result = run_epr_ensemble(setup, params["runs"], seed)
    stats, table = result["stats"], result["table"]

    out = io.StringIO()
    out.write("run,outcome,a_spin,b_spin,collapse_steps,collapse_time\n")
    n_anti = 0
    n_up = 0
    for i in range(stats.n_traj):
        o = int(stats.outcomes[i])
        steps = int(stats.collapse_steps[i])
        if o == UNDECIDED:
            out.write(f"{i},undecided,0,0,-1,\n")
            continue
        info = table[o]
        if info["a_spin"] == -info["b_spin"]:
            n_anti += 1
        if info["label"] == "up":
            n_up += 1
        out.write(
            f"{i},{info['label']},{info['a_spin']},{info['b_spin']},{steps},"
            f"{_fmt(steps * params['dt'])}\n"
        )

    decided = int((stats.outcomes != UNDECIDED).sum())
    summary = {
        "runs": stats.n_traj,
        "decided": decided,
        "undecided": stats.n_traj - decided,
        "p_up": n_up / decided if decided else None,
        "anti_correlated_fraction": n_anti / decided if decided else None,
        "mean_collapse_time": stats.mean_collapse_time,
        "norm_drift_max": stats.norm_drift_max,
        "outcome_table": {
            str(k): {kk: vv for kk, vv in v.items()} for k, v in table.items()
        },
    }
    return {"outcomes.csv": out.getvalue()}, summary


def _run_frame(params, seed):
    cmp = FrameComparison(
        boost_v=params["boost_v"],
        base_seed=seed,
        n_pairs=params["pairs"],
        spectrum=NoiseSpectrum.gaussian_cutoff(1.0, params["t_c"], params["r_c"]),
        gamma=params["gamma"],
        dt=params["dt"],
        n_steps_max=params["n_steps_max"],
        pointer_gap=params["pointer_gap"],
    )
    result = frame_experiment(cmp)

    out = io.StringIO()
    out.write("pair_index,outcome_rest,outcome_boosted,collapse_time_rest,collapse_time_boosted\n")
    for row in result["pairs"]:
        tr = row["collapse_time_rest"]
        tb = row["collapse_time_boosted"]
        out.write(
            f"{row['pair_index']},{row['outcome_rest']},{row['outcome_boosted']},"
            f"{_fmt(tr) if tr is not None else ''},{_fmt(tb) if tb is not None else ''}\n"
        )
    summary = {
        "n_pairs": result["n_pairs"],
        "n_divergent_outcomes": result["n_divergent_outcomes"],
        "stats_rest": result["stats_rest"],
        "stats_boosted": result["stats_boosted"],
        "lorentz_gamma": result["lorentz_gamma"],
    }
    return {"pairs.csv": out.getvalue()}, summary


def _run_mott(params, seed):
    cfg = MottConfig(
        k=params["k"],
        a=(0.0, 0.0, params["a_distance"]),
        sigma=params["sigma"],
        quadrature=QuadratureSpec(
            radial_points=params["radial_points"],
            angular_points=params["angular_points"],
            r_max=params["r_max"],
        ),
    )
    profile = angular_profile(cfg, params["n_angles"])
    a_hat = cfg.a_hat
    f_exact = amplitude_exact(cfg, a_hat)
    f_approx = amplitude_approx(cfg, a_hat)
    summary = {
        "k_sigma": cfg.k * cfg.sigma,
        "a_over_sigma": cfg.a_len / cfg.sigma,
        "half_width_cos": profile.half_width(),
        "peak_cos_theta": float(profile.cos_theta[np.argmax(profile.intensity)]),
        "peak_amplitude_exact": abs(f_exact),
        "peak_amplitude_approx": abs(f_approx),
        "peak_exact_vs_approx_rel_diff": abs(abs(f_exact) - abs(f_approx)) / abs(f_exact),
        "fresnel_parameter": cfg.k * cfg.sigma**2 / cfg.a_len,
    }
    return {"profile.csv": profile.to_csv()}, summary


def _run_heating(params, seed):
    consts = constants()
    betas = np.linspace(params["beta_start"], params["beta_stop"], params["beta_points"])
    results = sweep(params["lambda0"], params["r_c"], params["v_sound"], betas)
    dispersion = PhononDispersion(params["v_sound"])

    out = io.StringIO()
    out.write("beta,lambda_ratio\n")
    for r in results:
        out.write(f"{_fmt(r.beta)},{_fmt(r.lambda_eff / params['lambda0'])}\n")

    white = lambda_eff(NoiseSpectrum.white(params["lambda0"], params["r_c"]), dispersion)
    report = bound_check(white, consts, dispersion, params["r_c"])
    summary = {
        "lambda0": params["lambda0"],
        "v_sound": params["v_sound"],
        "r_c": params["r_c"],
        "cutoff_frequency": report["cutoff_frequency"],
        "bulk_bound": consts.bulk_heating_bound,
        "white_lambda_eff": white.lambda_eff,
        "white_bulk_ok": report["bulk_ok"],
        "beta_results": [
            {"beta": r.beta, "lambda_eff": r.lambda_eff, "bulk_ok": r.passes_bulk_bound}
            for r in results
        ],
    }
    return {"sweep.csv": out.getvalue()}, summary


def _run_ordering(params, seed):
    a = Event(x=params["x_a"], t=params["t_a"])
    b = Event(x=params["x_b"], t=params["t_b"])
    boost = Boost(v=params["boost_v"])
    v_ab = effective_velocity(a, b)
    order = time_order(a, b, boost)
    c = constants().c
    if np.isinf(v_ab) or abs(v_ab) > c:
        v_min = min_inversion_boost(a, b)
    else:
        v_min = None
    summary = {
        "v_ab": v_ab if not np.isinf(v_ab) else ("inf" if v_ab > 0 else "-inf"),
        "v_ab_over_c": v_ab / c if not np.isinf(v_ab) else None,
        "delta_t_boosted": order["delta_t_boosted"],
        "ordering": order["ordering"].value,
        "v_min": v_min,
        "v_min_over_c": v_min / c if v_min is not None else None,
    }
    return {}, summary


def _run_noise(params, seed):
    if params["kind"] == "white":
        spectrum = NoiseSpectrum.white(params["lambda0"], params["r_c"])
        raw = sample_white(params["channels"], params["steps"], params["dt"], seed)
        # sample_white emits unit intensity; scale to the requested lambda0
        traj = NoiseTrajectory(
            raw.n_channels, raw.n_steps, raw.dt,
            raw.increments * np.sqrt(params["lambda0"]), raw.seed, raw.kind,
        )
    else:
        if params["t_c"] <= 0:
            raise ConfigError("gaussian_cutoff noise requires t_c > 0")
        spectrum = NoiseSpectrum.gaussian_cutoff(
            params["lambda0"], params["t_c"], params["r_c"]
        )
        traj = sample_colored(spectrum, params["channels"], params["steps"],
                              params["dt"], seed)
    expected_var = float(increment_covariance(spectrum, params["dt"], np.array([0]))[0])
    sample_var = [float(np.var(traj.increments[ch])) for ch in range(traj.n_channels)]
    summary = {
        "kind": params["kind"],
        "channels": traj.n_channels,
        "steps": traj.n_steps,
        "dt": traj.dt,
        "expected_increment_variance": expected_var,
        "sample_increment_variance": sample_var,
    }
    return {"trajectory.csv": traj.to_csv()}, summary


_RUNNERS = {
    "collapse": _run_collapse,
    "epr": _run_epr,
    "frame": _run_frame,
    "mott": _run_mott,
    "heating": _run_heating,
    "ordering": _run_ordering,
    "noise": _run_noise,
}
