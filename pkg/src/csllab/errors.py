"""Exception hierarchy shared by all modules.

Each error class maps to a stable process exit code (see EXIT_CODES) so the
CLI and the HTTP service report failures consistently.
"""


class CslLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CslLabError):
    """Invalid or incomplete run configuration (bad key, missing unit, bad value)."""


class DimensionMismatchError(CslLabError):
    """Operands with incompatible Hilbert-space dimensions."""


class ContractViolationError(CslLabError):
    """An input violates a documented precondition (e.g. non-Hermitian operator)."""


class NumericalIntegrityError(CslLabError):
    """A computed quantity failed an internal numerical sanity bound."""


class CapacityError(CslLabError):
    """Requested object exceeds configured size limits."""


class ResolutionError(CslLabError):
    """Discretization too coarse for the requested operation."""


class StepSizeError(CslLabError):
    """Integrator step produced an unacceptable norm change; halve dt."""


class UnsupportedQueryError(CslLabError):
    """Query is meaningless for the given object (e.g. pointwise white-noise correlation)."""


class NoInversionPossibleError(CslLabError):
    """Event pair cannot have its temporal order inverted by any subluminal boost."""


class QuadratureError(CslLabError):
    """Numerical integration failed to converge to the required tolerance."""


EXIT_CODES = {
    ConfigError: 2,
    DimensionMismatchError: 3,
    ContractViolationError: 3,
    CapacityError: 3,
    UnsupportedQueryError: 3,
    NoInversionPossibleError: 3,
    ResolutionError: 4,
    StepSizeError: 4,
    NumericalIntegrityError: 5,
    QuadratureError: 5,
    CslLabError: 1,
}


def exit_code_for(exc: BaseException) -> int:
    """Exit code for an exception, walking the class hierarchy."""
    for klass in type(exc).__mro__:
        if klass in EXIT_CODES:
            return EXIT_CODES[klass]
    return 1
