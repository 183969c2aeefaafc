"""Custom exception classes for the application.

Defines domain-specific exceptions that can be raised throughout the
library and mapped to process exit codes by `core.error_handlers`.
"""

from typing import Optional, Any, Dict, Sequence


class AppException(Exception):
    """Base exception class for all application exceptions.

    Attributes:
        message: Human-readable error message.
        exit_code: Process exit code reported by the CLI.
        details: Optional additional error details (JSON-serializable).
    """

    def __init__(
        self,
        message: str,
        exit_code: int = 1,
        details: Optional[Dict[str, Any]] = None
    ):
        """Initialize application exception.

        Args:
            message: Error message.
            exit_code: CLI exit code (default: 1).
            details: Optional dictionary with additional error context.
        """
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class ValidationError(AppException):
    """Exception raised when input validation fails."""

    def __init__(self, message: str, field: Optional[str] = None):
        """Initialize validation error.

        Args:
            message: Validation error message.
            field: Optional field name that failed validation.
        """
        details = {"field": field} if field else {}
        super().__init__(message, details=details)


class ConfigurationError(AppException):
    """Exception raised when a run configuration is invalid."""

    def __init__(self, message: str, config_key: Optional[str] = None):
        details = {"config_key": config_key} if config_key else {}
        super().__init__(message, details=details)


class FieldMismatchError(AppException):
    """Raised when two operands live in different fields."""

    def __init__(self, left: str, right: str):
        super().__init__(
            f"field mismatch: {left} vs {right}",
            details={"left": left, "right": right},
        )


class DivisionByZeroError(AppException, ZeroDivisionError):
    """Raised on division by the zero element of a field."""

    def __init__(self, message: str = "division by zero"):
        super().__init__(message)


class WrongFieldError(AppException):
    """Raised when an operation is not available over the given field."""

    def __init__(self, operation: str, field: str):
        super().__init__(
            f"{operation} is not defined over {field}",
            details={"operation": operation, "field": field},
        )


class ArityMismatchError(AppException):
    """Raised when a point or oracle has the wrong number of coordinates."""

    def __init__(self, expected: int, got: int, what: str = "point"):
        super().__init__(
            f"{what} arity mismatch: expected {expected}, got {got}",
            details={"expected": expected, "got": got},
        )


class OrderingMismatchError(AppException):
    """Raised when polynomials over different basis orderings are combined."""

    def __init__(self, message: str = "polynomials use different orderings or fields"):
        super().__init__(message)


class ZeroPolynomialError(AppException):
    """Raised when a nonzero polynomial is required."""

    def __init__(self, operation: str):
        super().__init__(
            f"{operation} requires a nonzero polynomial",
            details={"operation": operation},
        )


class ZeroDenominatorError(AppException):
    """Raised when a substitution denominator is the zero polynomial."""

    def __init__(self):
        super().__init__("denominator polynomial is zero")


class ShapeMismatchError(AppException):
    """Raised when a matrix does not have the required shape."""

    def __init__(self, expected: str, rows: int, cols: int):
        super().__init__(
            f"expected a {expected} matrix, got {rows}x{cols}",
            details={"rows": rows, "cols": cols},
        )


class ExpressionSyntaxError(AppException):
    """Raised when expression or polynomial text does not parse.

    Attributes:
        position: Zero-based character offset of the offending token.
    """

    def __init__(self, message: str, text: str, position: int):
        self.position = position
        super().__init__(
            f"{message} at position {position}",
            details={"text": text, "position": position},
        )


class UnknownVariableError(AppException):
    """Raised when an expression mentions a variable outside the declared arity."""

    def __init__(self, name: str, position: int):
        self.position = position
        super().__init__(
            f"unknown variable '{name}'",
            details={"variable": name, "position": position},
        )


class OracleFailureError(AppException):
    """Raised when an oracle keeps returning undefined values."""

    def __init__(self, message: str, undefined: int, budget: int):
        super().__init__(message, details={"undefined": undefined, "budget": budget})


class AnnihilatorNotFoundError(AppException):
    """Raised when no annihilator exists within the configured search caps."""

    def __init__(self, message: str, n_max: int, sample_size: int):
        super().__init__(
            message,
            exit_code=2,
            details={"n_max": n_max, "sample_size": sample_size},
        )


class AllUnboundedError(AppException):
    """Raised when every slice of a profile reported an unbounded c."""

    def __init__(self, num_slices: int):
        super().__init__(
            f"all {num_slices} slices are unbounded",
            exit_code=2,
            details={"num_slices": num_slices},
        )


class DegenerateProbeError(AppException):
    """Raised when no probe tuple with a nonzero cofactor vector was found."""

    def __init__(self, attempts: int, n: int):
        super().__init__(
            f"no probe tuple of size {n - 1} gave a nonzero relation in {attempts} attempts",
            details={"attempts": attempts, "n": n},
        )


class VerificationFailedError(AppException):
    """Raised when a candidate identity fails at a fresh point."""

    def __init__(self, message: str, point: Optional[Sequence[str]] = None, failures: int = 1):
        details: Dict[str, Any] = {"failures": failures}
        if point is not None:
            details["point"] = list(point)
        super().__init__(message, exit_code=3, details=details)
