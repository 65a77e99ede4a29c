"""
Custom exceptions for sympball.

Provides a hierarchy of exceptions for numerical and I/O failures. Each
class carries the process exit code the CLI reports for it.
"""

from typing import Optional, Any


class SympballError(Exception):
    """Base exception for all sympball errors."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} (details: {self.details})"
        return self.message


class ConfigurationError(SympballError):
    """Raised when there's a configuration problem."""

    exit_code = 2


class ValidationError(SympballError):
    """Raised when a scalar argument is out of range."""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None,
                 value: Optional[Any] = None, details: Optional[Any] = None):
        super().__init__(message, details)
        self.field = field
        self.value = value


class DimensionMismatch(SympballError):
    """Raised when matrix or vector shapes are incompatible."""

    exit_code = 2

    def __init__(self, message: str, expected: Optional[Any] = None,
                 actual: Optional[Any] = None, details: Optional[Any] = None):
        super().__init__(message, details)
        self.expected = expected
        self.actual = actual

    def __str__(self) -> str:
        if self.expected is not None or self.actual is not None:
            return f"{self.message} (expected {self.expected}, got {self.actual})"
        return super().__str__()


class MatrixFileError(SympballError):
    """Raised when a matrix or subspace file cannot be read, parsed or written."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None,
                 details: Optional[Any] = None):
        super().__init__(message, details)
        self.path = path

    def __str__(self) -> str:
        location = f" [{self.path}]" if self.path else ""
        return f"{super().__str__()}{location}"


class NotSymmetric(SympballError):
    """Raised when a matrix required to be symmetric (and positive definite) is not."""

    exit_code = 3


class EigFailed(SympballError):
    """Raised when the symmetric eigensolver does not converge."""
    pass


class NotPositiveDefinite(SympballError):
    """Raised when a matrix required to be positive definite is not."""

    exit_code = 3


class PivotNotPD(NotPositiveDefinite):
    """Raised when the pivot block of a Schur complement is not positive definite."""
    pass


class Singular(SympballError):
    """Raised when a matrix is singular or too ill-conditioned to invert."""

    def __init__(self, message: str, condition: Optional[float] = None,
                 details: Optional[Any] = None):
        super().__init__(message, details)
        self.condition = condition


class PairingFailed(SympballError):
    """Raised when the eigenvalues of -K^2 do not come in pairs."""
    pass


class DegenerateClusterFailure(SympballError):
    """Raised when a Williamson frame cannot be built on a repeated-eigenvalue cluster."""
    pass


class NotSymplectic(SympballError):
    """Raised when a matrix required to be symplectic is not."""

    exit_code = 4

    def __init__(self, message: str, residual: Optional[float] = None,
                 details: Optional[Any] = None):
        super().__init__(message, details)
        self.residual = residual

    def __str__(self) -> str:
        if self.residual is not None:
            return f"{self.message} (|S^T J S - J|_max = {self.residual:.3e})"
        return super().__str__()


class NotComplex(SympballError):
    """Raised when a subspace is not invariant under J."""

    exit_code = 5


class RankDeficient(SympballError):
    """Raised when a set of vectors has lower rank than required."""
    pass


class GramSchmidtBreakdown(SympballError):
    """Raised when a unitary frame loses rank while being built."""
    pass
