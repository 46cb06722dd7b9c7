"""ConfScript frontend: lexing, parsing, semantic checks, printing, CFGs."""

from __future__ import annotations

from pathlib import Path

from ..diagnostics import ConfScriptError, Diagnostic
from . import ast
from .parser import parse_tokens
from .printer import print_program
from .sema import check_program


def parse_source(source: str, file_name: str = "<string>") -> ast.Program:
    """Parse and semantically check; raises ConfScriptError with diagnostics."""
    program = parse_tokens(source, file_name)
    diags = check_program(program)
    if diags:
        raise ConfScriptError(diags)
    return program


def try_parse_source(source: str, file_name: str = "<string>"):
    """Parse variant returning (program | None, diagnostics)."""
    try:
        program = parse_tokens(source, file_name)
    except ConfScriptError as e:
        return None, e.diagnostics
    diags = check_program(program)
    return (None, diags) if diags else (program, [])


def parse_file(path: str | Path) -> ast.Program:
    path = Path(path)
    return parse_source(path.read_text(encoding="utf-8"), str(path))


__all__ = ["ast", "parse_source", "try_parse_source", "parse_file",
           "print_program", "check_program", "ConfScriptError", "Diagnostic"]
