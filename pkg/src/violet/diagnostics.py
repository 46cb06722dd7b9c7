"""Diagnostics and error types shared across the toolchain."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """One reported problem, printable as ``file:line:col: severity: message``."""

    file: str
    line: int
    col: int
    severity: str  # "error" | "warning"
    message: str

    def render(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.severity}: {self.message}"


class VioletError(Exception):
    """Base class for all toolchain errors."""


class ConfScriptError(VioletError):
    """Parse or semantic failure; carries the diagnostic list."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics))


class AnalysisError(VioletError):
    """Static-analysis request on unknown nodes/statements/configs."""


class EngineError(VioletError):
    """Symbolic-execution failure (unsat state, unknown name, bad budget)."""


class ModelError(VioletError):
    """Malformed or inconsistent impact-model data."""


class CheckError(VioletError):
    """Checker failure (unsatisfiable predicate, no matching row)."""
