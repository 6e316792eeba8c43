"""Error handling."""
from dataclasses import dataclass
from typing import List, Optional, Sequence


@dataclass
class Error:
    line: int
    column: int
    message: Optional[str] = None


@dataclass
class ScannerError(Error):
    def __str__(self):
        return f"Scanner-error at line {self.line}, column {self.column}: {self.message}"


@dataclass
class ParserError(Error):
    def __str__(self):
        if self.message is None:
            return f"Parser-error at line {self.line}, column {self.column}"
        return f"Parser-error at line {self.line}, column {self.column}: {self.message}"


class ErrorHandler:
    had_error: bool = False
    error_report: List[Error] = []

    def __init__(self):
        ...

    def reset(self):
        self.had_error = False
        self.error_report.clear()

    def report(self, error: Error):
        self.had_error = True
        self.error_report.append(error)


handler = ErrorHandler()


class BeqError(Exception):
    """Base class for all library errors."""


class FormatError(BeqError):
    """A fixture or artifact file could not be read."""

    def __init__(self, errors: Sequence[Error], source: str = "<input>"):
        self.errors = list(errors)
        self.source = source
        lines = "; ".join(str(error) for error in self.errors)
        super().__init__(f"{source}: {lines}")


class InvariantViolation(BeqError):
    """A presentation, log or map broke one of its invariants."""


class UnknownElement(BeqError):
    """Element is not in the universe at the requested stage."""


class DanglingElement(BeqError):
    """A partial map refers to an element missing from its snapshot."""


class SemanticsMismatch(BeqError):
    """Approximation family used with the wrong semantics."""


class ProfileMismatch(BeqError):
    """Character profiles do not fit the requested algorithm."""


class SeedMismatch(BeqError):
    """Non-uniform seed data does not fit the presentations."""


class ExhaustedClasses(BeqError):
    """Target ran out of classes to embed into before the horizon."""


class ScheduleViolation(BeqError):
    """Enumeration schedule violates the x < s convention."""


class NormalizationViolation(BeqError):
    """Predicate does not respect the column normalization."""


class NoSurvivingWitness(BeqError):
    """No surviving coder witness is long enough to decode a bit."""


class OutsideClass(BeqError):
    """Profile lies outside the class an operation is defined for."""


class EvaluationError(BeqError):
    """A fixture expression could not be evaluated."""


class MissingParameter(BeqError):
    """A command or reduction input lacks a parameter it requires."""
