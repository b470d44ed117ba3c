"""Exceptions and diagnostics shared across memforge."""

from __future__ import annotations

from dataclasses import dataclass


class MemforgeError(Exception):
    """Base class for all memforge errors."""


class ModelError(MemforgeError, ValueError):
    """A value violates a structural invariant of the model."""


class Halted(MemforgeError):
    """Raised when stepping a configuration that has no successor."""


class IncompatibleMode(MemforgeError, ValueError):
    pass


class MultipleTravellerCrossings(MemforgeError):
    pass


class NotApplicable(MemforgeError):
    """A non-checking rule of a matrix found no occurrence of its left symbol."""


class CompileError(MemforgeError, ValueError):
    pass


class NeedsTwoRegisters(CompileError):
    pass


class TracesUnsupported(CompileError):
    pass


class ParseError(MemforgeError, ValueError):
    """Syntax or well-formedness error with a source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"
