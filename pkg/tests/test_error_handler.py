"""
Unit tests for error_handler.py - exit codes, messages and logging.
"""
import pytest
from loguru import logger

from modules.error_handler import (BudgetExceededError, EnumerationCapError, ErrorContext,
                                   ErrorHandler, ErrorSeverity, GeneratorMismatchError,
                                   IncompatiblePresentationError, InvalidGeneratorError,
                                   MachineSpaceError, MachineSyntaxError, OracleSizeError,
                                   UnsupportedOperationError, get_error_handler)


@pytest.fixture
def handler():
    return ErrorHandler()


@pytest.fixture
def context():
    return ErrorContext("covers", space="cantor-digits", expression="z0 &")


class TestExitCodes:
    """Every expected failure maps to its CLI exit code"""

    @pytest.mark.parametrize("error, code", [
        (IncompatiblePresentationError("mixed"), 2),
        (GeneratorMismatchError("wrong space"), 2),
        (UnsupportedOperationError("no section"), 2),
        (InvalidGeneratorError("bad interval"), 2),
        (MachineSyntaxError("unexpected '&'", 1, 4), 3),
        (BudgetExceededError("stream"), 4),
        (EnumerationCapError("cap"), 4),
        (OracleSizeError("too big"), 4),
        (MachineSpaceError("other"), 1),
        (RuntimeError("boom"), 1),
    ])
    def test_exit_code(self, handler, context, error, code):
        assert handler.handle(error, context).exit_code == code

    def test_invalid_generator_is_a_value_error(self):
        assert issubclass(InvalidGeneratorError, ValueError)

    def test_syntax_error_position(self):
        e = MachineSyntaxError("unexpected end of expression", 2, 7)
        assert (e.line, e.column) == (2, 7)
        assert str(e) == "unexpected end of expression (line 2, column 7)"


class TestMessages:
    """User-facing messages"""

    def test_syntax(self, handler, context):
        report = handler.handle(MachineSyntaxError("unexpected end of expression", 1, 5), context)
        assert report.message.startswith("syntax error: ")

    def test_mismatch(self, handler, context):
        assert handler.handle(GeneratorMismatchError("x"), context).message == "space mismatch: x"

    def test_limits(self, handler, context):
        assert handler.handle(EnumerationCapError("x"), context).message == "limit exceeded: x"

    def test_unexpected(self, handler, context):
        report = handler.handle(KeyError("k"), context)
        assert report.message.startswith("internal error during covers: KeyError")
        assert report.severity is ErrorSeverity.CRITICAL


class TestLogging:
    """Severity and log records"""

    @pytest.fixture
    def records(self):
        seen = []
        sink = logger.add(lambda m: seen.append(m.record), level="DEBUG")
        yield seen
        logger.remove(sink)

    def test_expected_failure_is_a_warning(self, handler, context, records):
        report = handler.handle(GeneratorMismatchError("x"), context, log_traceback=True)
        assert report.severity is ErrorSeverity.WARNING
        assert [r["level"].name for r in records] == ["WARNING"]
        assert records[0]["exception"] is None
        assert "Operation: covers" in records[0]["message"]

    def test_unexpected_failure_is_critical(self, handler, context, records):
        handler.handle(RuntimeError("y"), context)
        assert [r["level"].name for r in records] == ["CRITICAL"]

    def test_traceback_only_for_unexpected(self, handler, context, records):
        try:
            raise RuntimeError("z")
        except RuntimeError as e:
            handler.handle(e, context, log_traceback=True)
        assert records[0]["exception"] is not None

    def test_context_text(self, context):
        assert str(context) == "Operation: covers | Space: cantor-digits | Expression: 'z0 &'"

    def test_singleton(self):
        assert get_error_handler() is get_error_handler()
