"""
Exception hierarchy. Every error carries the exit code the CLI maps it to.
"""
from typing import Optional


class KdeError(Exception):
    """Base class for all errors raised by this package."""

    exit_code: int = 5


class ParseError(KdeError):
    """Malformed input data."""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(KdeError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 3


class InsufficientSamples(DomainError):
    """The sample set is too small for the requested operation."""

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        words = {1: "one", 2: "two"}.get(required, str(required))
        super().__init__(f"need at least {words} samples, got {available}")


class UnsupportedAsymptotics(KdeError):
    """No asymptotic expansion exists for the requested estimator."""

    exit_code = 4


class NumericalFailure(KdeError, ArithmeticError):
    """A numerical procedure failed to reach the requested accuracy."""

    exit_code = 5


class NonConvergence(NumericalFailure):
    """Adaptive quadrature did not meet its tolerance."""

    def __init__(self, message: str, worst_interval: Optional[tuple[float, float]] = None):
        self.worst_interval = worst_interval
        if worst_interval is not None:
            message = f"{message} (worst subinterval [{worst_interval[0]:.6g}, {worst_interval[1]:.6g}])"
        super().__init__(message)


class MonotonicityViolation(NumericalFailure):
    """The change of variables z(y, x) is not strictly monotone in y."""


class DerivativeNoise(NumericalFailure):
    """Finite-difference estimates disagree by more than the quantity they estimate."""
