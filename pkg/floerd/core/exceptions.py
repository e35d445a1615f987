"""Custom exceptions for floerd.

Each exception carries both an HTTP status code (for the API) and a process
exit code (for the CLI). Keyword arguments end up in ``extra`` and are
reported alongside the message.
"""


class FloerdException(Exception):
    """Base exception for the application."""

    def __init__(self, message: str, status_code: int = 422, exit_code: int = 1, **kwargs):
        self.message = message
        self.status_code = status_code
        self.exit_code = exit_code
        self.extra = kwargs
        super().__init__(message)

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message, **self.extra}


class ComplexValidationError(FloerdException):
    """Raised when a chain complex is malformed or fails validation."""

    def __init__(self, message: str = "Invalid complex", **kwargs):
        super().__init__(message=message, status_code=422, **kwargs)


class PreconditionError(FloerdException):
    """Raised when an operation is called outside its domain."""

    def __init__(self, message: str = "Precondition violated", **kwargs):
        super().__init__(message=message, status_code=422, **kwargs)


class WindowTooSmallError(FloerdException):
    """Raised when a truncation window cannot certify the homology it reports."""

    def __init__(self, message: str = "Truncation window too small", **kwargs):
        super().__init__(message=message, status_code=422, **kwargs)


class SizeGuardError(FloerdException):
    """Raised when a complex would exceed the configured generator limit."""

    def __init__(self, message: str = "Complex too large", **kwargs):
        super().__init__(message=message, status_code=413, **kwargs)


class BudgetExceededError(FloerdException):
    """Raised when a metabolizer enumeration exceeds its budget."""

    def __init__(self, message: str = "Enumeration budget exceeded", **kwargs):
        super().__init__(message=message, status_code=413, **kwargs)


class ExpressionSyntaxError(FloerdException):
    """Raised when a knot expression cannot be parsed."""

    def __init__(self, message: str = "Malformed knot expression", position: int = 0, **kwargs):
        self.position = position
        super().__init__(message=message, status_code=400, position=position, **kwargs)


class InconsistentResultError(FloerdException):
    """Raised when two independent computations of the same quantity disagree."""

    def __init__(self, message: str = "Inconsistent result", **kwargs):
        super().__init__(message=message, status_code=500, **kwargs)


class ReportIOError(FloerdException):
    """Raised when reading or writing a file fails."""

    def __init__(self, message: str = "I/O error", path: str = "", **kwargs):
        self.path = path
        super().__init__(message=message, status_code=500, exit_code=2, path=path, **kwargs)
