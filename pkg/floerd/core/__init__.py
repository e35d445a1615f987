"""Core functionality for floerd."""

from .exceptions import (
    FloerdException,
    ComplexValidationError,
    PreconditionError,
    WindowTooSmallError,
    SizeGuardError,
    BudgetExceededError,
    ExpressionSyntaxError,
    InconsistentResultError,
    ReportIOError,
)

__all__ = [
    'FloerdException',
    'ComplexValidationError',
    'PreconditionError',
    'WindowTooSmallError',
    'SizeGuardError',
    'BudgetExceededError',
    'ExpressionSyntaxError',
    'InconsistentResultError',
    'ReportIOError',
]
