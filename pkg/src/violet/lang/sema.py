"""Semantic checking for ConfScript programs.

Checks run after parsing and produce the full diagnostic list (they do
not stop at the first problem).  On success the program is annotated:
statement ids are assigned in preorder and bare identifiers that name
enum members are rewritten to enum literals.
"""

from __future__ import annotations

from ..diagnostics import ConfScriptError, Diagnostic
from . import ast

INT_DOMAIN_CAP = 4096

# Expression kinds: "int" (covers bool, C-style 0/1) or an EnumDomain.
Kind = object


class _Sema:
    def __init__(self, program: ast.Program):
        self.p = program
        self.file = program.source_name
        self.diags: list[Diagnostic] = []
        self.next_sid = 0
        self.enum_members: dict[str, ast.EnumDomain] = {}

    def error(self, pos: ast.Pos, msg: str) -> None:
        self.diags.append(Diagnostic(self.file, pos[0], pos[1], "error", msg))

    # -- declarations ---------------------------------------------------------

    def check_domain(self, dom: ast.Domain, pos: ast.Pos, owner: str) -> None:
        if isinstance(dom, ast.IntDomain):
            if dom.lo > dom.hi:
                self.error(pos, f"{owner}: empty domain [{dom.lo}, {dom.hi}]")
            elif dom.size() > INT_DOMAIN_CAP:
                self.error(pos, f"{owner}: domain has {dom.size()} values, cap is {INT_DOMAIN_CAP}")
        elif isinstance(dom, ast.EnumDomain):
            seen = set()
            for m in dom.members:
                if m in seen:
                    self.error(pos, f"{owner}: duplicate enum member {m!r}")
                seen.add(m)
                prior = self.enum_members.get(m)
                if prior is not None and prior != dom:
                    self.error(pos, f"{owner}: enum member {m!r} already belongs to a different enum")
                else:
                    self.enum_members[m] = dom

    def check_default(self, c: ast.ConfigParam) -> None:
        dom = c.domain
        if isinstance(dom, ast.BoolDomain) and c.default not in (0, 1):
            self.error(c.pos, f"config {c.name!r}: default {c.default} is not a bool")
        elif isinstance(dom, ast.IntDomain) and not (dom.lo <= c.default <= dom.hi):
            self.error(c.pos, f"config {c.name!r}: default {c.default} outside [{dom.lo}, {dom.hi}]")
        elif isinstance(dom, ast.EnumDomain) and not (0 <= c.default < dom.size()):
            self.error(c.pos, f"config {c.name!r}: default outside enum")

    def check_reserved(self, name: str, pos: ast.Pos) -> None:
        if name.startswith("__"):
            self.error(pos, f"{name!r}: names starting with '__' are reserved")

    def run(self) -> None:
        p = self.p
        names: dict[str, ast.Pos] = {}
        for c in p.configs:
            if c.name in names:
                self.error(c.pos, f"duplicate declaration of {c.name!r}")
            self.check_reserved(c.name, c.pos)
            names[c.name] = c.pos
            self.check_domain(c.domain, c.pos, f"config {c.name!r}")
            self.check_default(c)
        for i in p.inputs:
            if i.name in names:
                self.error(i.pos, f"duplicate declaration of {i.name!r}")
            names[i.name] = i.pos
            self.check_domain(i.domain, i.pos, f"input {i.name!r}")

        fn_names: dict[str, ast.Pos] = {}
        for f in p.functions:
            if f.name in fn_names:
                self.error(f.pos, f"duplicate function {f.name!r}")
            fn_names[f.name] = f.pos
            if f.name in ast.BUILTIN_NAMES:
                self.error(f.pos, f"{f.name!r} is a builtin and cannot be redefined")
            for q in f.params:
                self.check_domain(q.domain, f.pos, f"parameter {q.name!r} of {f.name!r}")
            if f.ret_domain is not None:
                self.check_domain(f.ret_domain, f.pos, f"return of {f.name!r}")
            if "pure" in f.attrs and f.ret_domain is None:
                self.error(f.pos, f"pure extern {f.name!r} must declare a return domain")

        entry = p.fn_map.get(p.entry)
        if entry is None:
            self.error((1, 1), f"no entry function {p.entry!r}")
        elif entry.params:
            self.error(entry.pos, f"entry function {p.entry!r} must take no parameters")

        for f in p.functions:
            if not f.is_extern:
                self.check_function(f)

        # Re-derive the cached lookup tables now that exprs were rewritten
        # and sids assigned.
        p.__post_init__()

    # -- function bodies ------------------------------------------------------

    def check_function(self, f: ast.FunctionDef) -> None:
        env: dict[str, Kind] = {}
        for c in self.p.configs:
            env[c.name] = self.kind_of(c.domain)
        for i in self.p.inputs:
            env[i.name] = self.kind_of(i.domain)
        for q in f.params:
            if q.name in env:
                self.error(f.pos, f"parameter {q.name!r} of {f.name!r} shadows a declaration")
            env[q.name] = self.kind_of(q.domain)
        # Locals resolve flow-insensitively: any assignment target in the
        # function introduces the name.
        assignable = set(q.name for q in f.params)
        for st in ast.walk_stmts(f.body):
            if isinstance(st, ast.Assign):
                target_kind = self.p.var_kind(st.target)
                if target_kind is not None:
                    self.error(st.pos, f"cannot assign to {target_kind} {st.target!r}")
                elif st.target in self.enum_members:
                    self.error(st.pos, f"cannot assign to enum member {st.target!r}")
                else:
                    self.check_reserved(st.target, st.pos)
                    assignable.add(st.target)
        for name in sorted(assignable):
            env.setdefault(name, None)  # kind filled lazily from first assignment

        self.ret_kind: Kind | None = None
        self.check_block(f.body, env, f)

    def kind_of(self, dom: ast.Domain) -> Kind:
        return dom if isinstance(dom, ast.EnumDomain) else "int"

    def check_block(self, body: list[ast.Stmt], env: dict, f: ast.FunctionDef) -> None:
        for idx, st in enumerate(body):
            st.sid = self.next_sid
            self.next_sid += 1
            if isinstance(st, ast.Return) and idx != len(body) - 1:
                self.error(body[idx + 1].pos, "unreachable code after return")
            self.check_stmt(st, env, f)

    def check_stmt(self, st: ast.Stmt, env: dict, f: ast.FunctionDef) -> None:
        if isinstance(st, ast.Assign):
            if isinstance(st.value, ast.CallExpr):
                st.value = ast.CallExpr(st.value.name,
                                        tuple(self.resolve(a, env) for a in st.value.args),
                                        pos=st.value.pos)
                ret = self.check_call(st.value.name, st.value.args, st.pos, env)
                if ret is None:
                    self.error(st.pos, f"call to {st.value.name!r} produces no value")
                if env.get(st.target) is None:
                    env[st.target] = ret
            else:
                st.value = self.resolve(st.value, env)
                k = self.infer(st.value, env)
                if env.get(st.target) is None:
                    env[st.target] = k
        elif isinstance(st, ast.CallStmt):
            st.args = tuple(self.resolve(a, env) for a in st.args)
            self.check_call(st.name, st.args, st.pos, env)
        elif isinstance(st, ast.If):
            st.cond = self.resolve(st.cond, env)
            self.require_int(st.cond, env, "if condition")
            self.check_block(st.then_body, env, f)
            self.check_block(st.else_body, env, f)
        elif isinstance(st, ast.While):
            st.cond = self.resolve(st.cond, env)
            self.require_int(st.cond, env, "while condition")
            if st.bound < 1:
                self.error(st.pos, f"while bound must be positive, got {st.bound}")
            self.check_block(st.body, env, f)
        elif isinstance(st, ast.Cost):
            if st.metric not in ast.COST_METRICS:
                self.error(st.pos, f"unknown cost metric {st.metric!r}; "
                                   f"one of {', '.join(ast.COST_METRICS)}")
        elif isinstance(st, ast.Return):
            if st.value is not None:
                st.value = self.resolve(st.value, env)
                k = self.infer(st.value, env)
                if self.ret_kind is None:
                    self.ret_kind = k
                elif k is not None and self.ret_kind != k:
                    self.error(st.pos, f"{f.name!r} returns values of different kinds")
        elif isinstance(st, ast.ConcretizeAll):
            if st.var not in env:
                self.error(st.pos, f"undeclared variable {st.var!r}")

    def check_call(self, name: str, args: tuple[ast.Expr, ...], pos: ast.Pos,
                   env: dict) -> Kind | None:
        """Type-check a call; returns the callee's return kind or None."""
        callee = self.p.fn_map.get(name)
        if callee is None:
            self.error(pos, f"call to undeclared function {name!r}")
            return None
        if len(args) != len(callee.params):
            self.error(pos, f"{name!r} takes {len(callee.params)} argument(s), got {len(args)}")
        for a, q in zip(args, callee.params):
            ak = self.infer(a, env)
            qk = self.kind_of(q.domain)
            if ak is not None and ak != qk:
                self.error(a.pos, f"argument {q.name!r} of {name!r} expects {self.kind_name(qk)}")
        if callee.is_extern:
            return self.kind_of(callee.ret_domain) if callee.ret_domain is not None else None
        for st in ast.walk_stmts(callee.body):
            if isinstance(st, ast.Return) and st.value is not None:
                return self.infer_static_return(callee)
        return None

    def infer_static_return(self, callee: ast.FunctionDef) -> Kind | None:
        # Value-returning user function: report "int" unless a bare enum
        # literal/var return makes the kind obvious.  Engine enforces at run.
        for st in ast.walk_stmts(callee.body):
            if isinstance(st, ast.Return) and isinstance(st.value, ast.EnumLit):
                return st.value.domain
        return "int"

    def kind_name(self, k: Kind) -> str:
        return "an enum value" if isinstance(k, ast.EnumDomain) else "an int"

    # -- expressions ----------------------------------------------------------

    def resolve(self, e: ast.Expr, env: dict) -> ast.Expr:
        """Rewrite bare identifiers that name enum members into literals."""
        if isinstance(e, ast.Var):
            if e.name not in env and e.name in self.enum_members:
                return ast.EnumLit(e.name, self.enum_members[e.name], pos=e.pos)
            return e
        if isinstance(e, ast.Unary):
            return ast.Unary(e.op, self.resolve(e.operand, env), pos=e.pos)
        if isinstance(e, ast.Binary):
            return ast.Binary(e.op, self.resolve(e.left, env), self.resolve(e.right, env), pos=e.pos)
        return e

    def infer(self, e: ast.Expr, env: dict) -> Kind | None:
        if isinstance(e, (ast.IntLit, ast.BoolLit)):
            return "int"
        if isinstance(e, ast.EnumLit):
            return e.domain
        if isinstance(e, ast.Var):
            if e.name not in env:
                self.error(e.pos, f"undeclared variable {e.name!r}")
                return None
            return env[e.name]
        if isinstance(e, ast.Unary):
            self.require_int(e.operand, env, "operand of '!'")
            return "int"
        if isinstance(e, ast.Binary):
            lk = self.infer(e.left, env)
            rk = self.infer(e.right, env)
            if e.op in ast.ARITH_OPS or e.op in ast.LOGIC_OPS or e.op in ("<", "<=", ">", ">="):
                for k, side in ((lk, e.left), (rk, e.right)):
                    if isinstance(k, ast.EnumDomain):
                        self.error(side.pos, f"enum value not allowed with {e.op!r}")
                return "int"
            # == and != accept two ints or two values of one enum
            if isinstance(lk, ast.EnumDomain) or isinstance(rk, ast.EnumDomain):
                if lk is not None and rk is not None and lk != rk:
                    self.error(e.pos, f"cannot compare {self.kind_name(lk)} with {self.kind_name(rk)}")
            return "int"
        raise TypeError(e)

    def require_int(self, e: ast.Expr, env: dict, what: str) -> None:
        k = self.infer(e, env)
        if isinstance(k, ast.EnumDomain):
            self.error(e.pos, f"{what} must be an int, got an enum value")


def check_program(program: ast.Program) -> list[Diagnostic]:
    """Run all semantic checks; annotate the program in place."""
    s = _Sema(program)
    s.run()
    return s.diags


def analyze(program: ast.Program) -> ast.Program:
    """check_program, raising on any diagnostic."""
    diags = check_program(program)
    if diags:
        raise ConfScriptError(diags)
    return program
