"""Exception types shared across the package."""

from __future__ import annotations


class MinimonError(Exception):
    """Base class for all package errors."""


class ParseError(MinimonError):
    """A trace, domain, or table file is malformed.

    `line` is the 1-based line number of the offending record, or None when
    the error is not tied to a single line.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DeterminismViolation(MinimonError):
    """Two observations assign different outputs to the same input.

    `index` is the 0-based position of the earlier conflicting event (or
    table row) when known; `line` the 1-based file line when parsing.
    """

    def __init__(self, message: str, index: int | None = None, line: int | None = None):
        super().__init__(message)
        self.index = index
        self.line = line


class InputOutsideDomain(MinimonError):
    """An input fell outside the declared domain.

    `position` is the 0-based trace position when the input came from an
    event stream, else None.
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class ProgramFailure(MinimonError):
    """A program under observation failed to produce a usable output."""

    def __init__(self, message: str, stderr: str | None = None):
        if stderr:
            message = f"{message} [stderr: {stderr.strip()[-500:]}]"
        super().__init__(message)
        self.stderr = stderr


class UnknownBuiltin(MinimonError):
    """No built-in program is registered under the requested name."""


class BudgetExceeded(MinimonError):
    """An exhaustive check would exceed its configured work budget."""


class DomainMismatch(MinimonError):
    """A test run exhausted the declared domain without a conclusive verdict.

    Reachable only when observed inputs repeat, i.e. the declared domain is
    not the domain of inputs the monitor actually observes (typical cause:
    testing a pre-processed composition over the raw domain instead of the
    pre-processor's range).
    """
