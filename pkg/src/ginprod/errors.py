"""Exception hierarchy shared by all ginprod modules."""

from __future__ import annotations


class GinprodError(Exception):
    """Base class for every error raised by ginprod."""


class DomainError(GinprodError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ConfigurationError(GinprodError, ValueError):
    """Evaluator parameters cannot meet their own accuracy contract."""


class ConvergenceError(GinprodError, ArithmeticError):
    """A series or quadrature stopped before reaching its tolerance.

    ``partial`` carries the best value obtained and ``bound`` the error
    estimate at the point of failure.
    """

    def __init__(self, message: str, partial=None, bound: float | None = None):
        super().__init__(message)
        self.partial = partial
        self.bound = bound


class NumericalError(GinprodError, ArithmeticError):
    """A numerical contract (e.g. eigen-solver residuals) was violated."""

    def __init__(self, message: str, stream_index: int | None = None):
        super().__init__(message)
        self.stream_index = stream_index


class StatisticsError(GinprodError, ValueError):
    """Too little Monte Carlo data for the requested estimate."""
