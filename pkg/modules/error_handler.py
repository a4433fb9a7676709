"""
Centralized error handling for the library and the command-line front end.

Every failure the package raises on purpose derives from MachineSpaceError and
carries the exit code the CLI reports for it. A SUSPENDED semi-decision is a
result, not an error, and never passes through here.
"""
from enum import Enum
from typing import Optional
from loguru import logger


class MachineSpaceError(Exception):
    """Base class for all expected failures"""
    exit_code = 1


class IncompatiblePresentationError(MachineSpaceError):
    """Generators from different presentations were combined"""
    exit_code = 2


class GeneratorMismatchError(MachineSpaceError):
    """A machine or point does not belong to the selected space"""
    exit_code = 2


class UnsupportedOperationError(MachineSpaceError):
    """The operation is not defined for the selected space"""
    exit_code = 2


class InvalidGeneratorError(MachineSpaceError, ValueError):
    """A generator payload violates its invariants"""
    exit_code = 2


class MachineSyntaxError(MachineSpaceError):
    """Machine expression could not be parsed"""
    exit_code = 3

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class BudgetExceededError(MachineSpaceError):
    """A stream point was read past its query budget"""
    exit_code = 4


class EnumerationCapError(MachineSpaceError):
    """An enumeration grew past its configured cap"""
    exit_code = 4


class OracleSizeError(MachineSpaceError):
    """A finite oracle was asked for a lattice beyond its bound"""
    exit_code = 4


class ErrorSeverity(Enum):
    """Error severity levels"""
    WARNING = "warning"
    CRITICAL = "critical"


class ErrorContext:
    """Context information for errors"""
    def __init__(self, operation: str, space: Optional[str] = None,
                 expression: Optional[str] = None):
        self.operation = operation
        self.space = space
        self.expression = expression

    def __str__(self):
        parts = [f"Operation: {self.operation}"]
        if self.space:
            parts.append(f"Space: {self.space}")
        if self.expression is not None:
            parts.append(f"Expression: {self.expression!r}")
        return " | ".join(parts)


class ErrorReport:
    """What the CLI prints and returns for a handled error"""
    def __init__(self, exit_code: int, message: str, severity: ErrorSeverity):
        self.exit_code = exit_code
        self.message = message
        self.severity = severity

    def __repr__(self):
        return f"<ErrorReport exit={self.exit_code} {self.message!r}>"


class ErrorHandler:
    """
    Central error handler: consistent logging and exit-code mapping.
    """

    def handle(self,
               error: Exception,
               context: ErrorContext,
               log_traceback: bool = False) -> ErrorReport:
        """
        Handle an error with consistent logging.

        Args:
            error: The exception that occurred
            context: Where the error occurred
            log_traceback: Whether to log the full traceback

        Returns:
            ErrorReport with the exit code and a user-facing message
        """
        severity = self.classify(error)

        log_msg = f"{context} | Error: {error}"
        if log_traceback and severity is ErrorSeverity.CRITICAL:
            logger.exception(log_msg)
        else:
            getattr(logger, severity.value)(log_msg)

        return ErrorReport(
            exit_code=self.exit_code_for(error),
            message=self._generate_user_message(error, context),
            severity=severity,
        )

    @staticmethod
    def classify(error: Exception) -> ErrorSeverity:
        """Input problems are warnings; anything unexpected is critical"""
        if isinstance(error, MachineSpaceError):
            return ErrorSeverity.WARNING
        return ErrorSeverity.CRITICAL

    @staticmethod
    def exit_code_for(error: Exception) -> int:
        if isinstance(error, MachineSpaceError):
            return error.exit_code
        return 1

    def _generate_user_message(self, error: Exception, context: ErrorContext) -> str:
        """Generate user-facing error message"""
        if isinstance(error, MachineSyntaxError):
            return f"syntax error: {error}"
        if isinstance(error, (GeneratorMismatchError, IncompatiblePresentationError)):
            return f"space mismatch: {error}"
        if isinstance(error, UnsupportedOperationError):
            return f"unsupported: {error}"
        if isinstance(error, (BudgetExceededError, EnumerationCapError, OracleSizeError)):
            return f"limit exceeded: {error}"
        if isinstance(error, MachineSpaceError):
            return f"{context.operation} failed: {error}"
        return f"internal error during {context.operation}: {type(error).__name__}: {error}"


# Global error handler instance
_error_handler = None


def get_error_handler() -> ErrorHandler:
    """Get the global error handler instance (singleton)"""
    global _error_handler
    if _error_handler is None:
        _error_handler = ErrorHandler()
    return _error_handler
