"""
Custom exception classes for the application.
"""


class BaseAppException(Exception):
    """Base exception for application-specific errors."""

    def __init__(self, message: str, error_code: str = None, details: dict = None):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)


class ValidationError(BaseAppException):
    """Exception raised when input validation fails."""
    pass


class DimensionMismatchError(ValidationError):
    """Exception raised when vectors, matrices or forms live in different dimensions."""
    pass


class LieAlgebraError(BaseAppException):
    """Exception raised when structure constants violate antisymmetry or Jacobi."""
    pass


class HermitianStructureError(BaseAppException):
    """Exception raised when (g, J) is not an almost Hermitian structure."""
    pass


class FormDegreeError(ValidationError):
    """Exception raised when an operation receives a form of unsupported degree."""
    pass


class NotApplicableError(BaseAppException):
    """Exception raised when a predicate is undefined for the given input (V = 0, n = 0)."""
    pass


class TripleError(BaseAppException):
    """Exception raised when a Kähler triple is invalid."""
    pass


class CorrespondenceError(BaseAppException):
    """Exception raised when the correspondence between triple classes cannot be applied."""
    pass


class ClassificationError(BaseAppException):
    """Exception raised when a triple cannot be put in normal form."""
    pass


class InfeasibleSystemError(BaseAppException):
    """Exception raised when a linear constraint system has no solution."""
    pass


class DocumentParseError(BaseAppException):
    """Exception raised when an algebra or triple document cannot be parsed."""
    pass


# Exceptions that signal a broken mathematical invariant in the input
INVARIANT_ERRORS = (LieAlgebraError, HermitianStructureError, TripleError)
