"""Symbolic values and expression evaluation.

A value is either a concrete int (bools are 0/1, enum values are member
indices) or a residual expression tree over symbolic variables.  Mixed
operations fold concrete subtrees eagerly, so residual trees only ever
reference symbolic variables.
"""

from __future__ import annotations

from typing import Callable, Union

from ..diagnostics import EngineError
from ..lang import ast

Value = Union[int, ast.Expr]  # int = concrete; Expr = symbolic residual


def is_concrete(v: Value) -> bool:
    return isinstance(v, int)


def _truth(v: int) -> int:
    return 1 if v != 0 else 0


def apply_binary(op: str, a: int, b: int) -> int:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "==":
        return 1 if a == b else 0
    if op == "!=":
        return 1 if a != b else 0
    if op == "<":
        return 1 if a < b else 0
    if op == "<=":
        return 1 if a <= b else 0
    if op == ">":
        return 1 if a > b else 0
    if op == ">=":
        return 1 if a >= b else 0
    if op == "&&":
        return _truth(a) & _truth(b)
    if op == "||":
        return _truth(a) | _truth(b)
    raise EngineError(f"unknown operator {op!r}")


def eval_concrete(e: ast.Expr, env: dict[str, int]) -> int:
    """Evaluate an expression under a full concrete assignment."""
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return 1 if e.value else 0
    if isinstance(e, ast.EnumLit):
        return e.value
    if isinstance(e, ast.Var):
        try:
            return env[e.name]
        except KeyError:
            raise EngineError(f"unbound variable {e.name!r}") from None
    if isinstance(e, ast.Unary):
        return 1 - _truth(eval_concrete(e.operand, env))
    if isinstance(e, ast.Binary):
        return apply_binary(e.op, eval_concrete(e.left, env), eval_concrete(e.right, env))
    raise TypeError(e)


def eval_value(e: ast.Expr, lookup: Callable[[str], Value]) -> Value:
    """Evaluate to a concrete int or a folded residual expression."""
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return 1 if e.value else 0
    if isinstance(e, ast.EnumLit):
        return e  # keep the member name for rendering
    if isinstance(e, ast.Var):
        v = lookup(e.name)
        return v
    if isinstance(e, ast.Unary):
        v = eval_value(e.operand, lookup)
        if isinstance(v, int):
            return 1 - _truth(v)
        return ast.Unary("!", v)
    if isinstance(e, ast.Binary):
        lv = eval_value(e.left, lookup)
        rv = eval_value(e.right, lookup)
        lc = concrete_of(lv)
        rc = concrete_of(rv)
        if lc is not None and rc is not None:
            return apply_binary(e.op, lc, rc)
        return ast.Binary(e.op, as_expr(lv), as_expr(rv))
    raise TypeError(e)


def concrete_of(v: Value) -> int | None:
    """Concrete int of a value, treating enum literals as their index."""
    if isinstance(v, int):
        return v
    if isinstance(v, ast.EnumLit):
        return v.value
    return None


def as_expr(v: Value) -> ast.Expr:
    return ast.IntLit(v) if isinstance(v, int) else v


def expr_vars(v: Value) -> set[str]:
    return set() if isinstance(v, int) else ast.expr_vars(v)
