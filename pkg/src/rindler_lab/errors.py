"""Exception hierarchy for rindler-lab.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical/solver failures with 3, invariant-check failures with 4.
"""


class RindlerLabError(Exception):
    """Base class for all rindler-lab errors."""


class ConfigError(RindlerLabError):
    """Invalid scenario configuration, missing key, or unsupported capability."""


class NumericsError(RindlerLabError):
    """Numerical evaluation or solver failure."""


class DomainError(NumericsError, ValueError):
    """Input outside the mathematical domain of an operation (e.g. behind the horizon)."""


class PreconditionError(NumericsError, ValueError):
    """Operation called outside its stated preconditions."""


class EvaluationError(NumericsError):
    """A model function produced a non-finite or otherwise invalid value."""


class ConvergenceError(NumericsError):
    """An iterative solver failed to converge within its iteration budget."""


class DifferentiationError(NumericsError):
    """Finite differencing failed to converge (function not smooth enough)."""
