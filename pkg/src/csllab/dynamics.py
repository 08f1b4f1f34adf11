"""Norm-preserving nonlinear stochastic collapse dynamics.

The state obeys (hbar = 1)

  d|psi> = [ -i H dt
             + sqrt(gamma) sum_i (M_i - <M_i>) dB_i
             - (gamma/2) sum_i (M_i - <M_i>)^2 dt ] |psi>,

with mutually commuting Hermitian collapse operators M_i, each driven by an
independent noise channel.  The exact flow conserves the norm pathwise; two
discrete step maps are provided:

- amplitude step (`step`): Euler-Maruyama on the amplitudes followed by
  explicit renormalization.  Its pre-renormalization norm defect fluctuates
  at order gamma*Var(M)*dt per step and is monitored against
  config.renorm_tolerance.
- probability step (used by `run_trajectory` whenever H = 0): Euler-Maruyama
  on the exactly equivalent Ito system for the joint-eigenbasis occupation
  probabilities, dp_k = 2 sqrt(gamma) p_k sum_i (m_ik - <M_i>) dB_i, with
  component phases frozen (they are constants of the H = 0 flow).  Because
  sum_k p_k (m_ik - <M_i>) = 0 identically, the update conserves sum(p)
  exactly: the discrete dynamics is an unbiased martingale and the
  pre-renormalization norm defect is floating-point roundoff.

Both maps renormalize every step and record the largest pre-renormalization
defect encountered.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, StepSizeError
from .hilbert import DenseOperator, StateVector
from .noise import NoiseKind, NoiseSpectrum, sample_colored
from .rng import derive_seed, generator

COMMUTATOR_TOL = 1e-10
UNDECIDED = -1

_NOISE_BLOCK = 1024  # white-noise draws per channel between generator calls


def gamma_csl_from(lambda0: float, r_c: float) -> float:
    """Field coupling strength 8 pi^{3/2} r_c^3 lambda0, units m^3 s^-1."""
    return 8.0 * np.pi**1.5 * r_c**3 * lambda0


def effective_coupling(lambda0: float, r_c: float, cell_volume: float | None = None) -> float:
    """Per-channel coupling after discretizing the noise field on lattice cells.

    With cells of the natural smearing volume 8 pi^{3/2} r_c^3 (the default)
    the effective coupling equals lambda0 itself.
    """
    if cell_volume is None:
        cell_volume = 8.0 * np.pi**1.5 * r_c**3
    return gamma_csl_from(lambda0, r_c) / cell_volume


@dataclass(frozen=True)
class JointEigenbasis:
    """Common eigenbasis of a commuting Hermitian family, with outcome grouping."""

    transform: np.ndarray          # columns are joint eigenvectors
    eigenvalues: np.ndarray        # shape (n_ops, dim)
    outcome_of_column: np.ndarray  # outcome index per basis column
    outcome_keys: tuple            # sorted joint-eigenvalue tuples, one per outcome

    @property
    def n_outcomes(self) -> int:
        return len(self.outcome_keys)

    def columns_of(self, outcome: int) -> np.ndarray:
        return np.nonzero(self.outcome_of_column == outcome)[0]


def _group_close(values: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(values)
    groups, current = [], [order[0]]
    for idx in order[1:]:
        if values[idx] - values[current[-1]] <= tol:
            current.append(idx)
        else:
            groups.append(np.array(current))
            current = [idx]
    groups.append(np.array(current))
    return groups


def joint_eigenbasis(ops: list[DenseOperator]) -> JointEigenbasis:
    """Simultaneously diagonalize commuting Hermitian operators.

    Diagonalizes the first operator, refines degenerate blocks with the next,
    and so on.  Outcomes are the distinct joint-eigenvalue tuples in
    lexicographic order.
    """
    dim = ops[0].dim
    scale = max(max(np.abs(op.entries).max() for op in ops), 1.0)
    tol = 1e-8 * scale
    basis = np.eye(dim, dtype=complex)
    blocks = [np.arange(dim)]
    eigenvalues = np.zeros((len(ops), dim))
    for i, op in enumerate(ops):
        refined = []
        for blk in blocks:
            sub = basis[:, blk].conj().T @ op.entries @ basis[:, blk]
            vals, vecs = np.linalg.eigh(sub)
            basis[:, blk] = basis[:, blk] @ vecs
            eigenvalues[i, blk] = vals
            for grp in _group_close(vals, tol):
                refined.append(blk[grp])
        blocks = refined
    keys = [
        tuple(round(float(eigenvalues[i, k]), 9) for i in range(len(ops)))
        for k in range(dim)
    ]
    unique_keys = sorted(set(keys))
    key_index = {key: n for n, key in enumerate(unique_keys)}
    outcome_of_column = np.array([key_index[k] for k in keys])
    return JointEigenbasis(basis, eigenvalues, outcome_of_column, tuple(unique_keys))


@dataclass(frozen=True)
class CSLConfig:
    """Parameters of one collapse integration.

    gamma_csl is the effective per-channel coupling after discretization (see
    `effective_coupling`); dt and all times are seconds with hbar = 1.
    """

    collapse_ops: list[DenseOperator]
    hamiltonian: DenseOperator | None = None
    gamma_csl: float = 1.0
    dt: float = 1e-3
    n_steps_max: int = 10_000
    collapse_threshold: float = 1.0 - 1e-6
    renorm_tolerance: float = 1e-8
    hysteresis_steps: int = 10
    basis: JointEigenbasis = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.collapse_ops:
            raise ContractViolationError("need at least one collapse operator")
        dim = self.collapse_ops[0].dim
        for op in self.collapse_ops:
            if not op.hermitian:
                raise ContractViolationError("collapse operators must be Hermitian")
            if op.dim != dim:
                raise ContractViolationError("collapse operators must share one dimension")
        if self.hamiltonian is not None and self.hamiltonian.dim != dim:
            raise ContractViolationError("Hamiltonian dimension mismatch")
        if self.gamma_csl < 0:
            raise ContractViolationError("gamma_csl must be non-negative")
        if self.dt <= 0 or self.n_steps_max < 1:
            raise ContractViolationError("dt must be positive and n_steps_max >= 1")
        if not (0.5 < self.collapse_threshold < 1.0):
            raise ContractViolationError("collapse_threshold must lie in (0.5, 1)")
        if self.hysteresis_steps < 1:
            raise ContractViolationError("hysteresis_steps must be >= 1")
        for i, a in enumerate(self.collapse_ops):
            for b in self.collapse_ops[i + 1 :]:
                comm = a.entries @ b.entries - b.entries @ a.entries
                worst = np.abs(comm).max()
                if worst >= COMMUTATOR_TOL:
                    raise ContractViolationError(
                        f"collapse operators do not commute (|[A,B]|_max = {worst:.2e})"
                    )
        object.__setattr__(self, "basis", joint_eigenbasis(self.collapse_ops))

    @property
    def dim(self) -> int:
        return self.collapse_ops[0].dim

    @property
    def n_channels(self) -> int:
        return len(self.collapse_ops)

    def hamiltonian_is_zero(self) -> bool:
        return self.hamiltonian is None or not np.any(self.hamiltonian.entries)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One collapse run: observable traces, outcome, and norm diagnostics."""

    times: np.ndarray
    observable_traces: np.ndarray  # shape (n_ops, len(times))
    final_state: StateVector
    outcome_index: int | None
    collapse_time: float | None
    norm_drift_max: float
    seed: int
    norm_defect_trace: np.ndarray | None = None  # per-step pre-renormalization defect

    def to_csv(self) -> str:
        """Columns: time, one m<i> per collapse operator, norm_drift."""
        cols = ["time"] + [f"m{i}" for i in range(self.observable_traces.shape[0])]
        cols.append("norm_drift")
        drift = self.norm_defect_trace
        lines = [",".join(cols)]
        for n, t in enumerate(self.times):
            row = [f"{t:.17g}"] + [f"{tr[n]:.17g}" for tr in self.observable_traces]
            row.append(f"{drift[n]:.17g}" if drift is not None else "0")
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EnsembleStats:
    """Aggregated outcome frequencies and norm-drift diagnostics."""

    n_traj: int
    outcome_counts: dict[int, int]
    mean_collapse_time: float | None
    born_probabilities: dict[int, float]
    norm_drift_max: float
    outcomes: np.ndarray        # per-trajectory outcome (UNDECIDED where none)
    collapse_steps: np.ndarray  # per-trajectory decision step, -1 where none

    def frequency(self, outcome: int) -> float:
        return self.outcome_counts.get(outcome, 0) / self.n_traj


def born_probabilities(config: CSLConfig, psi0: StateVector) -> dict[int, float]:
    """|<eigenspace|psi0>|^2 per outcome index."""
    amps = config.basis.transform.conj().T @ psi0.amplitudes
    p = np.abs(amps) ** 2
    return {g: float(p[config.basis.columns_of(g)].sum()) for g in range(config.basis.n_outcomes)}


def step(psi: StateVector, config: CSLConfig, increments) -> StateVector:
    """One amplitude Euler-Maruyama step plus renormalization.

    `increments` holds one Brownian increment per collapse operator.  Raises
    StepSizeError when the pre-renormalization norm defect exceeds
    100 * renorm_tolerance, the signal to halve dt.
    """
    inc = np.asarray(increments, dtype=float)
    if inc.shape != (config.n_channels,):
        raise ContractViolationError(f"need {config.n_channels} increments, got shape {inc.shape}")
    new_amps, defect = _amplitude_step(psi.amplitudes, config, inc)
    if defect > 100.0 * config.renorm_tolerance:
        raise StepSizeError(
            f"pre-renormalization norm defect {defect:.3e} exceeds "
            f"{100.0 * config.renorm_tolerance:.3e}; halve dt"
        )
    return StateVector(new_amps)


def _amplitude_step(amps: np.ndarray, config: CSLConfig, inc: np.ndarray):
    """Euler-Maruyama update; returns (renormalized amplitudes, norm defect)."""
    gamma, dt = config.gamma_csl, config.dt
    sqg = np.sqrt(gamma)
    dpsi = np.zeros_like(amps)
    if not config.hamiltonian_is_zero():
        dpsi += -1j * dt * (config.hamiltonian.entries @ amps)
    norm2 = float(np.vdot(amps, amps).real)
    for op, db in zip(config.collapse_ops, inc):
        m_psi = op.entries @ amps
        mbar = float(np.vdot(amps, m_psi).real) / norm2
        centered = m_psi - mbar * amps
        dpsi += sqg * db * centered
        centered2 = op.entries @ centered - mbar * centered  # (M - <M>)^2 psi
        dpsi += -0.5 * gamma * dt * centered2
    new = amps + dpsi
    new_norm2 = float(np.vdot(new, new).real)
    defect = abs(new_norm2 / norm2 - 1.0)
    return new / np.sqrt(new_norm2), defect


class _ProbabilityEngine:
    """Vectorized probability-representation integrator for a batch of runs.

    Holds occupation probabilities p with shape (n_runs, dim).  Outcome
    detection requires an eigenspace probability above the collapse threshold
    for hysteresis_steps consecutive steps; the recorded decision step is the
    first step of that streak.
    """

    def __init__(self, config: CSLConfig, p0: np.ndarray):
        self.config = config
        self.p = p0.copy()
        n_runs = self.p.shape[0]
        basis = config.basis
        self.m = basis.eigenvalues
        self.group_matrix = np.zeros((basis.n_outcomes, config.dim))
        for g in range(basis.n_outcomes):
            self.group_matrix[g, basis.columns_of(g)] = 1.0
        # nondegenerate spectra: eigenspace probabilities are the p columns
        self.trivial_groups = basis.n_outcomes == config.dim and bool(
            (basis.outcome_of_column == np.arange(config.dim)).all()
        )
        self.streak = np.zeros(n_runs, dtype=int)
        self.streak_start = np.full(n_runs, -1, dtype=int)
        self.streak_outcome = np.full(n_runs, UNDECIDED, dtype=int)
        self.outcome = np.full(n_runs, UNDECIDED, dtype=int)
        self.decision_step = np.full(n_runs, -1, dtype=int)
        self.norm_defect_max = 0.0
        self.last_defect = 0.0
        self.sqg = np.sqrt(config.gamma_csl)

    def expectations(self, rows: np.ndarray | slice = slice(None)) -> np.ndarray:
        """<M_i> per run, shape (n_rows, n_ops)."""
        return self.p[rows] @ self.m.T

    def advance(self, step_index: int, increments: np.ndarray,
                rows: np.ndarray | slice = slice(None)) -> None:
        """One step for the selected rows; increments shape (n_rows, n_ops)."""
        p = self.p[rows]
        if self.m.shape[0] == 1:
            mbar = p @ self.m[0]
            drive = increments[:, 0, None] * (self.m[0][None, :] - mbar[:, None])
        else:
            centered = self.m[None, :, :] - (p @ self.m.T)[:, :, None]  # (rows, ops, dim)
            drive = np.einsum("ri,rik->rk", increments, centered)
        p = p + 2.0 * self.sqg * p * drive
        np.clip(p, 0.0, None, out=p)
        total = p.sum(axis=1)
        defect = float(np.abs(total - 1.0).max())
        self.last_defect = defect
        if defect > self.norm_defect_max:
            self.norm_defect_max = defect
        self.p[rows] = p / total[:, None]
        self._detect(step_index, rows)

    def _detect(self, step_index: int, rows: np.ndarray | slice) -> None:
        cfg = self.config
        p = self.p[rows]
        group_p = p if self.trivial_groups else p @ self.group_matrix.T
        leader = np.argmax(group_p, axis=1)
        lead_p = group_p[np.arange(group_p.shape[0]), leader]
        over = lead_p > cfg.collapse_threshold
        streak = self.streak[rows]
        streak_outcome = self.streak_outcome[rows]
        streak_start = self.streak_start[rows]
        same = over & (streak_outcome == leader)
        fresh = over & ~same
        streak[same] += 1
        streak[fresh] = 1
        streak[~over] = 0
        streak_outcome[fresh] = leader[fresh]
        streak_outcome[~over] = UNDECIDED
        streak_start[fresh] = step_index
        outcome = self.outcome[rows]
        decision = self.decision_step[rows]
        ready = (outcome == UNDECIDED) & (streak >= cfg.hysteresis_steps)
        outcome[ready] = streak_outcome[ready]
        decision[ready] = streak_start[ready]
        self.streak[rows] = streak
        self.streak_outcome[rows] = streak_outcome
        self.streak_start[rows] = streak_start
        self.outcome[rows] = outcome
        self.decision_step[rows] = decision

    def all_decided(self, rows: np.ndarray | slice = slice(None)) -> bool:
        return bool((self.outcome[rows] != UNDECIDED).all())


def _unit_intensity(spectrum: NoiseSpectrum | None) -> NoiseSpectrum | None:
    """Injected noise carries unit white-equivalent intensity; the coupling
    strength lives in gamma_csl.  White spectra map to None (standard dB)."""
    if spectrum is None or spectrum.kind == NoiseKind.WHITE:
        return None
    return NoiseSpectrum.gaussian_cutoff(1.0, spectrum.t_c, spectrum.r_c)


class _WhiteBlockSource:
    """Per-trajectory white increments drawn in fixed-size blocks.

    The block pattern is part of the determinism contract: a trajectory
    consumes standard_normal((n_channels, _NOISE_BLOCK)) slabs in order, so
    scalar and vectorized paths see identical numbers.
    """

    def __init__(self, seed: int, n_channels: int, dt: float):
        self.rng = generator(seed)
        self.n_channels = n_channels
        self.scale = np.sqrt(dt)

    def block_at(self, start: int) -> np.ndarray:
        return self.rng.standard_normal((self.n_channels, _NOISE_BLOCK)) * self.scale


class _ColoredSource:
    """Per-trajectory colored increments, synthesized over the full horizon."""

    def __init__(self, spectrum: NoiseSpectrum, seed: int, n_channels: int,
                 dt: float, n_steps: int):
        traj = sample_colored(spectrum, n_channels, n_steps, dt, seed, allow_coarse=True)
        self.increments = traj.increments

    def block_at(self, start: int) -> np.ndarray:
        return self.increments[:, start : start + _NOISE_BLOCK]


def _noise_source(colored: NoiseSpectrum | None, seed: int, config: CSLConfig):
    if colored is None:
        return _WhiteBlockSource(seed, config.n_channels, config.dt)
    return _ColoredSource(colored, seed, config.n_channels, config.dt, config.n_steps_max)


def run_trajectory(
    config: CSLConfig,
    psi0: StateVector,
    spectrum: NoiseSpectrum | None,
    seed: int,
    record_traces: bool = True,
) -> TrajectoryRecord:
    """Integrate one collapse run until decision or n_steps_max.

    spectrum None (or a white spectrum) drives the run with standard Brownian
    increments; a Gaussian-cutoff spectrum substitutes colored increments of
    unit white-equivalent intensity into the same discrete update.  With
    H = 0 the probability step map is used, otherwise the amplitude map.
    """
    if abs(psi0.norm() - 1.0) > 1e-9:
        raise ContractViolationError("psi0 must be normalized")
    if psi0.dim != config.dim:
        raise ContractViolationError("psi0 dimension mismatch")
    if not config.hamiltonian_is_zero():
        return _run_trajectory_amplitude(config, psi0, spectrum, seed, record_traces)

    basis = config.basis
    amps0 = basis.transform.conj().T @ psi0.amplitudes
    p0 = np.abs(amps0) ** 2
    engine = _ProbabilityEngine(config, p0[None, :])
    source = _noise_source(_unit_intensity(spectrum), seed, config)

    traces = [engine.expectations()[0]]
    defects = [0.0]
    step_index = 0
    while step_index < config.n_steps_max and not engine.all_decided():
        block = source.block_at(step_index)
        n_block = min(block.shape[1], config.n_steps_max - step_index)
        for j in range(n_block):
            engine.advance(step_index, block[None, :, j])
            if record_traces:
                traces.append(engine.expectations()[0])
                defects.append(engine.last_defect)
            step_index += 1
            if engine.all_decided():
                break

    return _probability_record(config, engine, amps0, traces, defects, step_index,
                               seed, record_traces)


def _probability_record(config, engine, amps0, traces, defects, n_executed, seed,
                        record_traces):
    """Assemble a TrajectoryRecord from a finished single-run probability engine."""
    basis = config.basis
    outcome = int(engine.outcome[0])
    decided = outcome != UNDECIDED
    # final state: sqrt(p) carrying the initial component phases
    mag = np.abs(amps0)
    phases = np.where(mag > 0, amps0 / np.where(mag > 0, mag, 1.0), 1.0)
    final = StateVector(basis.transform @ (np.sqrt(engine.p[0]) * phases))
    if record_traces:
        times = np.arange(len(traces)) * config.dt
        defect_trace = np.array(defects)
    else:
        traces = traces + [engine.expectations()[0]]
        times = np.array([0.0, n_executed * config.dt])
        defect_trace = None
    return TrajectoryRecord(
        times=times,
        observable_traces=np.array(traces).T,
        final_state=final,
        outcome_index=outcome if decided else None,
        collapse_time=float(engine.decision_step[0]) * config.dt if decided else None,
        norm_drift_max=engine.norm_defect_max,
        seed=seed,
        norm_defect_trace=defect_trace,
    )


def run_with_increments(
    config: CSLConfig,
    psi0: StateVector,
    increments: np.ndarray,
    seed: int = 0,
    record_traces: bool = False,
) -> TrajectoryRecord:
    """Integrate one H = 0 collapse run driven by caller-supplied increments.

    `increments` has shape (n_channels, n_steps); integration stops at
    decision, at n_steps, or at config.n_steps_max, whichever comes first.
    Used by experiments that need two runs driven by correlated noise.
    """
    if not config.hamiltonian_is_zero():
        raise ContractViolationError("run_with_increments requires H = 0")
    if abs(psi0.norm() - 1.0) > 1e-9:
        raise ContractViolationError("psi0 must be normalized")
    inc = np.asarray(increments, dtype=float)
    if inc.ndim != 2 or inc.shape[0] != config.n_channels:
        raise ContractViolationError(
            f"increments must have shape (n_channels={config.n_channels}, n_steps)"
        )
    basis = config.basis
    amps0 = basis.transform.conj().T @ psi0.amplitudes
    p0 = np.abs(amps0) ** 2
    engine = _ProbabilityEngine(config, p0[None, :])
    traces = [engine.expectations()[0]]
    defects = [0.0]
    horizon = min(inc.shape[1], config.n_steps_max)
    step_index = 0
    while step_index < horizon and not engine.all_decided():
        engine.advance(step_index, inc[None, :, step_index])
        if record_traces:
            traces.append(engine.expectations()[0])
            defects.append(engine.last_defect)
        step_index += 1
    return _probability_record(config, engine, amps0, traces, defects, step_index,
                               seed, record_traces)


def _run_trajectory_amplitude(config, psi0, spectrum, seed, record_traces):
    """Amplitude-map trajectory, used when the Hamiltonian is nonzero."""
    source = _noise_source(_unit_intensity(spectrum), seed, config)
    basis = config.basis
    group_matrix = np.zeros((basis.n_outcomes, config.dim))
    for g in range(basis.n_outcomes):
        group_matrix[g, basis.columns_of(g)] = 1.0

    amps = psi0.amplitudes.copy()
    norm_defect_max = 0.0
    streak, streak_outcome, streak_start = 0, UNDECIDED, -1
    outcome, decision_step = UNDECIDED, -1
    times, traces = [0.0], [[float(np.vdot(amps, op.entries @ amps).real)
                             for op in config.collapse_ops]]
    defects = [0.0]

    step_index = 0
    while step_index < config.n_steps_max and outcome == UNDECIDED:
        block = source.block_at(step_index)
        n_block = min(block.shape[1], config.n_steps_max - step_index)
        for j in range(n_block):
            amps, defect = _amplitude_step(amps, config, block[:, j])
            if defect > 100.0 * config.renorm_tolerance:
                raise StepSizeError(f"norm defect {defect:.3e} at step {step_index}; halve dt")
            norm_defect_max = max(norm_defect_max, defect)
            if record_traces:
                times.append((step_index + 1) * config.dt)
                traces.append([float(np.vdot(amps, op.entries @ amps).real)
                               for op in config.collapse_ops])
                defects.append(defect)
            group_p = group_matrix @ (np.abs(basis.transform.conj().T @ amps) ** 2)
            leader = int(np.argmax(group_p))
            if group_p[leader] > config.collapse_threshold:
                if leader == streak_outcome:
                    streak += 1
                else:
                    streak, streak_outcome, streak_start = 1, leader, step_index
                if streak >= config.hysteresis_steps:
                    outcome, decision_step = leader, streak_start
            else:
                streak, streak_outcome = 0, UNDECIDED
            step_index += 1
            if outcome != UNDECIDED:
                break

    decided = outcome != UNDECIDED
    return TrajectoryRecord(
        times=np.array(times),
        observable_traces=np.array(traces).T,
        final_state=StateVector(amps),
        outcome_index=outcome if decided else None,
        collapse_time=float(decision_step) * config.dt if decided else None,
        norm_drift_max=norm_defect_max,
        seed=seed,
        norm_defect_trace=np.array(defects) if record_traces else None,
    )


def run_ensemble(
    config: CSLConfig,
    psi0: StateVector,
    spectrum: NoiseSpectrum | None,
    n_traj: int,
    master_seed: int,
    chunk_size: int = 256,
) -> EnsembleStats:
    """Independent trajectories with derived seeds, aggregated by index.

    Trajectory i consumes exactly the noise stream it would consume under
    run_trajectory(config, psi0, spectrum, derive_seed(master_seed, i));
    the chunked vectorization is an implementation detail.
    """
    if n_traj < 1:
        raise ContractViolationError("n_traj must be >= 1")
    if not config.hamiltonian_is_zero():
        raise ContractViolationError("ensemble runs require H = 0")
    if abs(psi0.norm() - 1.0) > 1e-9:
        raise ContractViolationError("psi0 must be normalized")
    if psi0.dim != config.dim:
        raise ContractViolationError("psi0 dimension mismatch")

    basis = config.basis
    amps0 = basis.transform.conj().T @ psi0.amplitudes
    p0 = np.abs(amps0) ** 2
    colored = _unit_intensity(spectrum)

    outcomes = np.full(n_traj, UNDECIDED, dtype=int)
    decision_steps = np.full(n_traj, -1, dtype=int)
    norm_defect_max = 0.0

    for chunk_start in range(0, n_traj, chunk_size):
        idx = np.arange(chunk_start, min(chunk_start + chunk_size, n_traj))
        sources = [
            _noise_source(colored, derive_seed(master_seed, int(i)), config) for i in idx
        ]
        engine = _ProbabilityEngine(config, np.tile(p0, (idx.size, 1)))
        active = np.arange(idx.size)
        step_index = 0
        while step_index < config.n_steps_max and active.size:
            blocks = np.stack([sources[a].block_at(step_index) for a in active])
            n_block = min(blocks.shape[2], config.n_steps_max - step_index)
            for j in range(n_block):
                engine.advance(step_index, blocks[:, :, j], rows=active)
                step_index += 1
                if engine.all_decided(rows=active):
                    break
            active = active[engine.outcome[active] == UNDECIDED]
        outcomes[idx] = engine.outcome
        decision_steps[idx] = engine.decision_step
        norm_defect_max = max(norm_defect_max, engine.norm_defect_max)

    counts: dict[int, int] = {}
    for o in outcomes:
        counts[int(o)] = counts.get(int(o), 0) + 1
    decided = decision_steps >= 0
    mean_time = float(decision_steps[decided].mean() * config.dt) if decided.any() else None
    born = {g: float(p0[basis.columns_of(g)].sum()) for g in range(basis.n_outcomes)}
    return EnsembleStats(
        n_traj=n_traj,
        outcome_counts=counts,
        mean_collapse_time=mean_time,
        born_probabilities=born,
        norm_drift_max=norm_defect_max,
        outcomes=outcomes,
        collapse_steps=decision_steps,
    )
