"""Pre-built collapse experiments.

Three setups:

- Stern-Gerlach: a two-level spin measured along x, entangled with a
  two-level pointer whose collapse-operator eigenvalue gap models the
  apparatus mass.  The cat state (|x+>|ptr+> + |x->|ptr->)/sqrt(2) reduces to
  one branch.
- EPR: two spins in a singlet plus a pointer measuring spin A, reducing to
  |A up>|B down>|ptr up> or |A down>|B up>|ptr down>; spins come out strictly
  anti-correlated.
- Frame comparison: the same Stern-Gerlach measurement driven by one
  frequency-domain noise realization synthesized through two spectra, the
  isotropic-frame one and its boost-dilated counterpart (correlation time
  multiplied by the Lorentz gamma of the boost).  Individual outcomes may
  differ between the frames; outcome statistics must not.

Basis convention everywhere: tensor factors ordered spin(s) before pointer,
row-major (left factor varies slowest).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import constants
from .dynamics import (
    UNDECIDED,
    CSLConfig,
    EnsembleStats,
    run_ensemble,
    run_trajectory,
    run_with_increments,
)
from .errors import ContractViolationError, UnsupportedQueryError
from .hilbert import DenseOperator, StateVector
from .noise import (
    NoiseKind,
    NoiseSpectrum,
    embedding_length,
    frequency_gaussians,
    synthesize_increments,
)
from .rng import derive_seed

SPIN_UP = 1
SPIN_DOWN = -1


def _pointer_operator(dim_system: int, gap: float) -> DenseOperator:
    """Collapse operator acting on a trailing two-level pointer: eigenvalues +-gap/2."""
    pointer = np.diag([gap / 2.0, -gap / 2.0]).astype(complex)
    return DenseOperator(np.kron(np.eye(dim_system, dtype=complex), pointer), hermitian=True)


# ---------------------------------------------------------------------------
# Stern-Gerlach


@dataclass(frozen=True)
class SternGerlachSetup:
    """Measurement of a spin component, pointer-driven reduction."""

    pointer_gap: float = 2.0
    gamma: float = 1.0
    dt: float = 1e-3
    n_steps_max: int = 40_000
    threshold: float = 1.0 - 1e-6

    def config(self) -> CSLConfig:
        return CSLConfig(
            collapse_ops=[_pointer_operator(2, self.pointer_gap)],
            gamma_csl=self.gamma,
            dt=self.dt,
            n_steps_max=self.n_steps_max,
            collapse_threshold=self.threshold,
        )

    def initial_state(self) -> StateVector:
        # (|x+>|ptr+> + |x->|ptr->)/sqrt(2) in (spin, pointer) indices
        return StateVector(np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0))


def _pointer_up_outcome(config: CSLConfig) -> int:
    """Outcome index whose joint eigenvalue is the positive pointer eigenvalue."""
    keys = config.basis.outcome_keys
    return max(range(len(keys)), key=lambda g: keys[g][0])


def run_stern_gerlach(setup: SternGerlachSetup, seed: int) -> dict:
    """One measurement run; outcome 'up'/'down' or 'undecided'."""
    config = setup.config()
    record = run_trajectory(config, setup.initial_state(), None, seed, record_traces=False)
    up = _pointer_up_outcome(config)
    if record.outcome_index is None:
        label = "undecided"
    else:
        label = "up" if record.outcome_index == up else "down"
    return {"outcome": label, "collapse_time": record.collapse_time, "record": record}


# ---------------------------------------------------------------------------
# EPR singlet reduction


@dataclass(frozen=True)
class EPRSetup:
    """Singlet pair plus a massive pointer measuring spin A.

    The pointer eigenvalue gap stands in for the apparatus mass; reduction
    must be apparatus-driven, so the gap is required to be >= 10.
    """

    apparatus_mass_gap: float = 100.0
    gamma: float = 1.0
    dt: float = 1e-6
    n_steps_max: int = 100_000
    threshold: float = 1.0 - 1e-6

    def __post_init__(self):
        if self.apparatus_mass_gap < 10.0:
            raise ContractViolationError("apparatus_mass_gap must be >= 10")

    def config(self) -> CSLConfig:
        return CSLConfig(
            collapse_ops=[_pointer_operator(4, self.apparatus_mass_gap)],
            gamma_csl=self.gamma,
            dt=self.dt,
            n_steps_max=self.n_steps_max,
            collapse_threshold=self.threshold,
        )


def build_epr_state() -> StateVector:
    """Entangled pre-measurement state (|A up>|B down>|ptr up> - |A down>|B up>|ptr down>)/sqrt(2).

    Ordering A x B x pointer; spin-up is component 0 of each factor.
    """
    amps = np.zeros(8, dtype=complex)
    amps[0b010] = 1.0 / np.sqrt(2.0)   # A up, B down, pointer up
    amps[0b101] = -1.0 / np.sqrt(2.0)  # A down, B up, pointer down
    return StateVector(amps)


def _spin_values(index: int) -> tuple[int, int]:
    """(a_spin, b_spin) of a computational basis index of the 8-dim EPR space."""
    a = SPIN_UP if (index >> 2) & 1 == 0 else SPIN_DOWN
    b = SPIN_UP if (index >> 1) & 1 == 0 else SPIN_DOWN
    return a, b


def epr_outcome_table(config: CSLConfig) -> dict[int, dict]:
    """Per-outcome reduced state and spin readout.

    Projects the entangled initial state onto each pointer eigenspace; the
    surviving component fixes (a_spin, b_spin) for that outcome.  The joint
    eigenbasis may permute the computational basis, so support columns are
    mapped back through the transform.
    """
    psi0 = build_epr_state()
    transform = config.basis.transform
    amps_basis = transform.conj().T @ psi0.amplitudes
    table = {}
    up_outcome = _pointer_up_outcome(config)
    for g in range(config.basis.n_outcomes):
        cols = config.basis.columns_of(g)
        weights = np.abs(amps_basis[cols]) ** 2
        support = cols[weights > 1e-12]
        if support.size != 1:
            raise ContractViolationError("EPR projection must land on a single basis state")
        column = transform[:, int(support[0])]
        target = int(np.argmax(np.abs(column)))
        if abs(abs(column[target]) - 1.0) > 1e-9:
            raise ContractViolationError("pointer eigenvectors must be computational basis states")
        a_spin, b_spin = _spin_values(target)
        table[g] = {
            "label": "up" if g == up_outcome else "down",
            "a_spin": a_spin,
            "b_spin": b_spin,
            "target_state": target,
        }
    return table


def run_epr(setup: EPRSetup, seed: int) -> dict:
    """One EPR reduction; reports outcome, both spins, fidelity, collapse time."""
    config = setup.config()
    psi0 = build_epr_state()
    record = run_trajectory(config, psi0, None, seed, record_traces=False)
    if record.outcome_index is None:
        return {"outcome": "undecided", "a_spin": 0, "b_spin": 0,
                "collapse_time": None, "fidelity": None, "record": record}
    info = epr_outcome_table(config)[record.outcome_index]
    target = np.zeros(8, dtype=complex)
    target[info["target_state"]] = 1.0
    fidelity = float(np.abs(np.vdot(target, record.final_state.amplitudes)) ** 2)
    return {
        "outcome": info["label"],
        "a_spin": info["a_spin"],
        "b_spin": info["b_spin"],
        "collapse_time": record.collapse_time,
        "fidelity": fidelity,
        "record": record,
    }


def run_epr_ensemble(setup: EPRSetup, n_runs: int, master_seed: int,
                     chunk_size: int = 256) -> dict:
    """Vectorized EPR ensemble: outcome stats plus the outcome -> spins table."""
    config = setup.config()
    stats: EnsembleStats = run_ensemble(config, build_epr_state(), None, n_runs,
                                        master_seed, chunk_size=chunk_size)
    return {"stats": stats, "table": epr_outcome_table(config)}


# ---------------------------------------------------------------------------
# Frame comparison


@dataclass(frozen=True)
class FrameComparison:
    """Boosted-vs-rest repetition of the Stern-Gerlach measurement.

    Each pair index derives one frequency-domain noise realization; the rest
    run synthesizes increments through `spectrum`, the boosted run through the
    gamma-dilated spectrum (correlation time gamma * t_c).  Requires a colored
    spectrum: a boost acts trivially on white noise.
    """

    boost_v: float
    base_seed: int
    n_pairs: int
    spectrum: NoiseSpectrum
    gamma: float = 2.0
    dt: float = 0.1
    n_steps_max: int = 4000
    pointer_gap: float = 2.0
    threshold: float = 1.0 - 1e-6

    def __post_init__(self):
        if not (0.0 <= self.boost_v < constants().c):
            raise ContractViolationError("boost speed must satisfy 0 <= v < c")
        if self.n_pairs < 1:
            raise ContractViolationError("n_pairs must be >= 1")
        if self.spectrum.kind != NoiseKind.GAUSSIAN_CUTOFF:
            raise UnsupportedQueryError(
                "frame comparison requires a colored spectrum; the white correlation "
                "is boost-invariant and the comparison would be vacuous"
            )

    @property
    def lorentz_gamma(self) -> float:
        beta = self.boost_v / constants().c
        return 1.0 / np.sqrt(1.0 - beta * beta)


def frame_experiment(cmp: FrameComparison) -> dict:
    """Run n_pairs boosted-vs-rest pairs and count divergent individual outcomes.

    Returns per-pair outcomes, both outcome histograms, and the divergence
    count.  At boost_v = 0 the two runs of each pair are identical by
    construction.
    """
    setup = SternGerlachSetup(
        pointer_gap=cmp.pointer_gap, gamma=cmp.gamma, dt=cmp.dt,
        n_steps_max=cmp.n_steps_max, threshold=cmp.threshold,
    )
    config = setup.config()
    psi0 = setup.initial_state()
    up = _pointer_up_outcome(config)

    rest = NoiseSpectrum.gaussian_cutoff(1.0, cmp.spectrum.t_c, cmp.spectrum.r_c)
    boosted = rest.dilated(cmp.lorentz_gamma)
    # one embedding length for both spectra, padded for the wider correlation
    n_fft = embedding_length(cmp.n_steps_max, boosted.t_c, cmp.dt)

    labels = {up: "up", 1 - up: "down", UNDECIDED: "undecided"}
    pairs = []
    counts = {"rest": {"up": 0, "down": 0, "undecided": 0},
              "boosted": {"up": 0, "down": 0, "undecided": 0}}
    n_divergent = 0
    for i in range(cmp.n_pairs):
        zeta = frequency_gaussians(1, n_fft // 2 + 1, derive_seed(cmp.base_seed, i))
        row = {"pair_index": i}
        outcomes = {}
        for tag, spec in (("rest", rest), ("boosted", boosted)):
            inc = synthesize_increments(spec, zeta, cmp.dt, cmp.n_steps_max, n_fft)
            record = run_with_increments(config, psi0, inc)
            out = record.outcome_index if record.outcome_index is not None else UNDECIDED
            outcomes[tag] = out
            counts[tag][labels[out]] += 1
            row[f"outcome_{tag}"] = labels[out]
            row[f"collapse_time_{tag}"] = record.collapse_time
        if (outcomes["rest"] != outcomes["boosted"]
                and UNDECIDED not in outcomes.values()):
            n_divergent += 1
        pairs.append(row)
    return {
        "n_pairs": cmp.n_pairs,
        "n_divergent_outcomes": n_divergent,
        "stats_rest": counts["rest"],
        "stats_boosted": counts["boosted"],
        "pairs": pairs,
        "lorentz_gamma": cmp.lorentz_gamma,
    }
