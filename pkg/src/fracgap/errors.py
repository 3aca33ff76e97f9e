"""Exception types raised by fracgap."""


class FracGapError(Exception):
    """Base class for all library errors."""


class DomainError(FracGapError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(FracGapError, ArithmeticError):
    """A series or iterative refinement did not reach its tolerance."""


class QuadratureError(FracGapError, ArithmeticError):
    """A quadrature rule is too coarse for the requested entries."""


class SolverError(FracGapError, RuntimeError):
    """The eigensolver failed or the discretization is unusable."""


class ConfigError(FracGapError, ValueError):
    """A run configuration failed validation."""
