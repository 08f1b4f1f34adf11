"""Dense complex linear algebra for finite-dimensional state vectors and operators.

Deliberately minimal: dense storage, composite dimension capped at MAX_DIM.
Tensor-product amplitude ordering is row-major (left factor index varies
slowest), and every composite module in the package relies on that convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapacityError,
    ContractViolationError,
    DimensionMismatchError,
    NumericalIntegrityError,
)

MAX_DIM = 4096
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    """Finite-dimensional complex state; amplitudes stored as a read-only array."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise ContractViolationError("state vector needs a non-empty 1-d amplitude list")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise NumericalIntegrityError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n)


@dataclass(frozen=True)
class DenseOperator:
    """Dense square operator; hermitian flag is validated at construction."""

    entries: np.ndarray
    hermitian: bool = field(default=True)

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ContractViolationError("operator entries must form a square matrix")
        if self.hermitian:
            dev = np.abs(mat - mat.conj().T).max()
            if dev >= HERMITIAN_TOL:
                raise ContractViolationError(
                    f"operator marked hermitian deviates from M = M^dagger by {dev:.3e}"
                )
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @staticmethod
    def diagonal(values) -> "DenseOperator":
        vals = np.asarray(values, dtype=float)
        return DenseOperator(np.diag(vals.astype(complex)), hermitian=True)

    @staticmethod
    def identity(dim: int) -> "DenseOperator":
        return DenseOperator(np.eye(dim, dtype=complex), hermitian=True)

    @staticmethod
    def zero(dim: int) -> "DenseOperator":
        return DenseOperator(np.zeros((dim, dim), dtype=complex), hermitian=True)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"inner product of dim {a.dim} with dim {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply(op: DenseOperator, psi: StateVector) -> StateVector:
    """Matrix-vector product op|psi>."""
    if op.dim != psi.dim:
        raise DimensionMismatchError(f"operator dim {op.dim} applied to state dim {psi.dim}")
    return StateVector(op.entries @ psi.amplitudes)


def expectation(op: DenseOperator, psi: StateVector) -> float:
    """<psi|op|psi> for a Hermitian operator on a normalized state.

    The imaginary residue must stay below IMAG_RESIDUE_TOL; it is asserted and
    then discarded.
    """
    if not op.hermitian:
        raise ContractViolationError("expectation requires a Hermitian operator")
    if op.dim != psi.dim:
        raise DimensionMismatchError(f"operator dim {op.dim} vs state dim {psi.dim}")
    if abs(psi.norm() - 1.0) > 1e-9:
        raise ContractViolationError("expectation requires a normalized state")
    val = complex(np.vdot(psi.amplitudes, op.entries @ psi.amplitudes))
    if abs(val.imag) >= IMAG_RESIDUE_TOL:
        raise NumericalIntegrityError(
            f"expectation of a Hermitian operator has imaginary residue {val.imag:.3e}"
        )
    return float(val.real)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product with row-major ordering: index of `a` varies slowest."""
    new_dim = a.dim * b.dim
    if new_dim > MAX_DIM:
        raise CapacityError(f"tensor product dim {new_dim} exceeds maximum {MAX_DIM}")
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def tensor_operator(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    """Operator tensor product, same ordering convention as `tensor`."""
    new_dim = a.dim * b.dim
    if new_dim > MAX_DIM:
        raise CapacityError(f"tensor product dim {new_dim} exceeds maximum {MAX_DIM}")
    return DenseOperator(np.kron(a.entries, b.entries), hermitian=a.hermitian and b.hermitian)


def basis_state(dim: int, index: int) -> StateVector:
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)
