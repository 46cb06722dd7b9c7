"""Pretty-printer for ConfScript.

print → reparse yields a structurally identical program; this is the
frontend round-trip guarantee.
"""

from __future__ import annotations

from . import ast

# grammar precedence levels: || < && < ! < comparisons < +- < *
_PREC = {"||": 1, "&&": 2, "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6}
_NOT_PREC = 3


def print_expr(e: ast.Expr | ast.CallExpr, parent_prec: int = 0) -> str:
    if isinstance(e, ast.IntLit):
        return str(e.value)
    if isinstance(e, ast.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ast.EnumLit):
        return e.member
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Unary):
        text = "!" + print_expr(e.operand, _NOT_PREC)
        return f"({text})" if _NOT_PREC < parent_prec else text
    if isinstance(e, ast.CallExpr):
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, ast.Binary):
        prec = _PREC[e.op]
        # comparisons do not chain in the grammar, so a comparison operand
        # of a comparison needs its own parentheses
        left_prec = prec + 1 if e.op in ast.CMP_OPS else prec
        text = f"{print_expr(e.left, left_prec)} {e.op} {print_expr(e.right, prec + 1)}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(e)


def print_domain(d: ast.Domain) -> str:
    return d.render()


def _print_block(body: list[ast.Stmt], indent: int, out: list[str]) -> None:
    pad = "    " * indent
    for st in body:
        if isinstance(st, ast.Assign):
            out.append(f"{pad}{st.target} := {print_expr(st.value)};")
        elif isinstance(st, ast.CallStmt):
            out.append(f"{pad}{st.name}({', '.join(print_expr(a) for a in st.args)});")
        elif isinstance(st, ast.If):
            _print_if(st, indent, out)
        elif isinstance(st, ast.While):
            out.append(f"{pad}while ({print_expr(st.cond)}) bound {st.bound} {{")
            _print_block(st.body, indent + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(st, ast.Cost):
            out.append(f"{pad}cost {st.metric} {st.amount};")
        elif isinstance(st, ast.Return):
            out.append(f"{pad}return;" if st.value is None
                       else f"{pad}return {print_expr(st.value)};")
        elif isinstance(st, ast.TraceOn):
            out.append(f"{pad}trace_on();")
        elif isinstance(st, ast.TraceOff):
            out.append(f"{pad}trace_off();")
        elif isinstance(st, ast.ConcretizeAll):
            out.append(f"{pad}concretize_all({st.var});")
        else:
            raise TypeError(st)


def _print_if(st: ast.If, indent: int, out: list[str]) -> None:
    pad = "    " * indent
    out.append(f"{pad}if ({print_expr(st.cond)}) {{")
    _print_block(st.then_body, indent + 1, out)
    # else-if chains print flat, the way they parse
    cur = st
    while len(cur.else_body) == 1 and isinstance(cur.else_body[0], ast.If):
        nxt = cur.else_body[0]
        out.append(f"{pad}}} else if ({print_expr(nxt.cond)}) {{")
        _print_block(nxt.then_body, indent + 1, out)
        cur = nxt
    if cur.else_body:
        out.append(f"{pad}}} else {{")
        _print_block(cur.else_body, indent + 1, out)
    out.append(f"{pad}}}")


def print_program(p: ast.Program) -> str:
    out: list[str] = []
    for c in p.configs:
        out.append(f"config {c.name}: {print_domain(c.domain)} = {c.domain.render_value(c.default)};")
    for i in p.inputs:
        out.append(f"input {i.name}: {print_domain(i.domain)};")
    for f in p.functions:
        out.append("")
        params = ", ".join(f"{q.name}: {print_domain(q.domain)}" for q in f.params)
        if f.is_extern:
            attrs = " ".join(a for a in ("pure", "benign") if a in f.attrs)
            attrs = f" {attrs}" if attrs else ""
            ret = f" -> {print_domain(f.ret_domain)}" if f.ret_domain is not None else ""
            out.append(f"extern{attrs} fn {f.name}({params}){ret};")
        else:
            out.append(f"fn {f.name}({params}) {{")
            _print_block(f.body, 1, out)
            out.append("}")
    return "\n".join(out) + "\n"
