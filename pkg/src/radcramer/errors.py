"""Exception hierarchy shared by the solvers and oracles."""


class RadCramerError(Exception):
    """Base class for all package errors."""


class DomainError(RadCramerError, ValueError):
    """Input outside the domain where an operation is defined."""


class BoundaryError(DomainError):
    """Point lies on (or within the guard band of) the edge of the effective domain."""


class ExteriorError(BoundaryError):
    """Point lies strictly outside the effective domain."""


class DegenerateError(DomainError):
    """All weights are zero, so the series is identically zero."""


class InfeasibleError(DomainError):
    """The constraint set of the entropy minimization is empty."""


class SizeError(RadCramerError, ValueError):
    """Exact computation would exceed its configured size cap."""


class ConvergenceError(RadCramerError, RuntimeError):
    """An iterative solver did not reach its tolerance.

    Carries the iteration count and final residual for diagnostics.
    """

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
