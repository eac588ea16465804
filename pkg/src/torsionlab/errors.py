"""Exception types shared across the package."""


class TorsionLabError(Exception):
    """Base class for all package errors."""


class StructuralError(TorsionLabError):
    """Objects living on different bases, mismatched ranks or shapes."""


class PositivityError(TorsionLabError):
    """A metric sample is not Hermitian positive definite."""


class ExactnessError(TorsionLabError):
    """A complex fails d^2 = 0 or has nonzero cohomology."""

    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


class ConvergenceError(TorsionLabError):
    """Quadrature did not reach the requested tolerance within its node budget."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class SchemaError(TorsionLabError):
    """Malformed JSON input."""


class DomainError(TorsionLabError, ValueError):
    """Argument outside the domain of a special function."""
