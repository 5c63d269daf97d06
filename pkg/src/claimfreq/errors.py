"""Exception hierarchy shared by the numerics, estimation and CLI layers."""

from __future__ import annotations


class ClaimFreqError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ClaimFreqError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConvergenceError(ClaimFreqError, ArithmeticError):
    """An iterative solver exhausted its budget.

    ``bracket`` holds the last ``(lo, hi)`` interval known to contain the root.
    """

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


class EstimationError(ClaimFreqError, ValueError):
    """Moment estimates cannot be formed from the sample."""


class DegenerateSampleError(EstimationError):
    """The sample variance is zero."""


class InfeasibleMomentsError(EstimationError):
    """The sample variance reaches or exceeds ``mean * (1 - mean)``."""


class BoundaryMeanError(EstimationError):
    """The sample mean sits on the boundary of ``[0, 1]``."""


class UndefinedCorrelationError(ClaimFreqError, ValueError):
    """Correlation with a constant sequence is undefined."""


class SimulationError(ClaimFreqError, RuntimeError):
    """The Monte-Carlo driver could not produce the requested replicates."""


class InputError(ClaimFreqError, ValueError):
    """Malformed or inconsistent input data."""


class ParseError(InputError):
    """A portfolio file could not be parsed; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
