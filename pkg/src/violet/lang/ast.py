"""ConfScript abstract syntax.

All value domains are finite: bool, bounded int, enum.  Expression nodes
are frozen and compare structurally (positions excluded), which is what
the round-trip guarantee of the frontend is stated over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Pos = tuple[int, int]  # (line, col), 1-based line, 1-based col

COST_METRICS = ("latency", "syscalls", "file_io_ops", "io_bytes", "sync_ops", "net_ops")
ALL_METRICS = ("latency", "instructions") + COST_METRICS[1:]


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoolDomain:
    def size(self) -> int:
        return 2

    def values(self) -> range:
        return range(2)

    def render_value(self, v: int) -> str:
        return "true" if v else "false"

    def render(self) -> str:
        return "bool"


@dataclass(frozen=True)
class IntDomain:
    lo: int
    hi: int

    def size(self) -> int:
        return self.hi - self.lo + 1

    def values(self) -> range:
        return range(self.lo, self.hi + 1)

    def render_value(self, v: int) -> str:
        return str(v)

    def render(self) -> str:
        return f"int in [{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class EnumDomain:
    members: tuple[str, ...]

    def size(self) -> int:
        return len(self.members)

    def values(self) -> range:
        return range(len(self.members))

    def render_value(self, v: int) -> str:
        return self.members[v]

    def render(self) -> str:
        return "enum {" + ", ".join(self.members) + "}"


Domain = Union[BoolDomain, IntDomain, EnumDomain]


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class EnumLit:
    member: str
    domain: EnumDomain
    pos: Pos = field(default=(0, 0), compare=False)

    @property
    def value(self) -> int:
        return self.domain.members.index(self.member)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "!" only; unary minus is folded into IntLit by the parser
    operand: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Binary:
    op: str  # + - * == != < <= > >= && ||
    left: Expr
    right: Expr
    pos: Pos = field(default=(0, 0), compare=False)


Expr = Union[IntLit, BoolLit, EnumLit, Var, Unary, Binary]

CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*")
LOGIC_OPS = ("&&", "||")


def expr_vars(e: Expr) -> set[str]:
    """Names of all variables referenced by an expression."""
    out: set[str] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, Unary):
            stack.append(n.operand)
        elif isinstance(n, Binary):
            stack.append(n.left)
            stack.append(n.right)
    return out


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CallExpr:
    """A call in assignment position: ``x := f(a, b);``."""

    name: str
    args: tuple[Expr, ...]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass
class Assign:
    target: str
    value: Expr | CallExpr
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class CallStmt:
    name: str
    args: tuple[Expr, ...]
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class If:
    cond: Expr
    then_body: list[Stmt]
    else_body: list[Stmt]
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class While:
    cond: Expr
    bound: int
    body: list[Stmt]
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class Cost:
    metric: str
    amount: int
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class Return:
    value: Expr | None
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class TraceOn:
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class TraceOff:
    pos: Pos = (0, 0)
    sid: int = -1


@dataclass
class ConcretizeAll:
    var: str
    pos: Pos = (0, 0)
    sid: int = -1


Stmt = Union[Assign, CallStmt, If, While, Cost, Return, TraceOn, TraceOff, ConcretizeAll]

BUILTIN_NAMES = ("trace_on", "trace_off", "concretize_all")


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------

@dataclass
class ConfigParam:
    name: str
    domain: Domain
    default: int  # encoded value (bool 0/1, int literal, enum member index)
    pos: Pos = (0, 0)


@dataclass
class InputParam:
    name: str
    domain: Domain
    pos: Pos = (0, 0)


@dataclass
class Param:
    name: str
    domain: Domain


@dataclass
class FunctionDef:
    name: str
    params: list[Param]
    body: list[Stmt]
    attrs: frozenset[str] = frozenset()  # subset of {"extern", "pure", "benign"}
    ret_domain: Domain | None = None
    pos: Pos = (0, 0)

    @property
    def is_extern(self) -> bool:
        return "extern" in self.attrs


@dataclass
class Program:
    configs: list[ConfigParam]
    inputs: list[InputParam]
    functions: list[FunctionDef]
    source_name: str = "<string>"
    entry: str = "main"

    def __post_init__(self) -> None:
        self.config_map = {c.name: c for c in self.configs}
        self.input_map = {i.name: i for i in self.inputs}
        self.fn_map = {f.name: f for f in self.functions}
        # Global enum-member table: member name -> domain (members are
        # globally unique; structurally identical enums are one type).
        self.enum_members: dict[str, EnumDomain] = {}
        for dom in self._all_domains():
            if isinstance(dom, EnumDomain):
                for m in dom.members:
                    self.enum_members[m] = dom
        # sid -> (function name, statement)
        self.stmt_index: dict[int, tuple[str, Stmt]] = {}
        for fn in self.functions:
            for st in walk_stmts(fn.body):
                self.stmt_index[st.sid] = (fn.name, st)

    def _all_domains(self):
        for c in self.configs:
            yield c.domain
        for i in self.inputs:
            yield i.domain
        for f in self.functions:
            for p in f.params:
                yield p.domain
            if f.ret_domain is not None:
                yield f.ret_domain

    def domain_of(self, name: str) -> Domain | None:
        """Domain of a declared config or input, else None."""
        if name in self.config_map:
            return self.config_map[name].domain
        if name in self.input_map:
            return self.input_map[name].domain
        return None

    def var_kind(self, name: str) -> str | None:
        """"config", "input", or None for anything else."""
        if name in self.config_map:
            return "config"
        if name in self.input_map:
            return "input"
        return None


def walk_stmts(body: list[Stmt]):
    """Preorder traversal of a statement block, including nested blocks."""
    for st in body:
        yield st
        if isinstance(st, If):
            yield from walk_stmts(st.then_body)
            yield from walk_stmts(st.else_body)
        elif isinstance(st, While):
            yield from walk_stmts(st.body)


def stmt_exprs(st: Stmt):
    """Expressions appearing directly in one statement (not nested blocks)."""
    if isinstance(st, Assign):
        if isinstance(st.value, CallExpr):
            yield from st.value.args
        else:
            yield st.value
    elif isinstance(st, CallStmt):
        yield from st.args
    elif isinstance(st, (If, While)):
        yield st.cond
    elif isinstance(st, Return) and st.value is not None:
        yield st.value


# ---------------------------------------------------------------------------
# Structural signatures (round-trip comparison ignores positions and sids)
# ---------------------------------------------------------------------------

def _expr_sig(e: Expr | CallExpr):
    if isinstance(e, IntLit):
        return ("int", e.value)
    if isinstance(e, BoolLit):
        return ("bool", e.value)
    if isinstance(e, EnumLit):
        return ("enum", e.member, e.domain.members)
    if isinstance(e, Var):
        return ("var", e.name)
    if isinstance(e, Unary):
        return ("un", e.op, _expr_sig(e.operand))
    if isinstance(e, Binary):
        return ("bin", e.op, _expr_sig(e.left), _expr_sig(e.right))
    if isinstance(e, CallExpr):
        return ("call", e.name, tuple(_expr_sig(a) for a in e.args))
    raise TypeError(e)


def _stmt_sig(st: Stmt):
    if isinstance(st, Assign):
        return ("assign", st.target, _expr_sig(st.value))
    if isinstance(st, CallStmt):
        return ("callst", st.name, tuple(_expr_sig(a) for a in st.args))
    if isinstance(st, If):
        return ("if", _expr_sig(st.cond), _block_sig(st.then_body), _block_sig(st.else_body))
    if isinstance(st, While):
        return ("while", _expr_sig(st.cond), st.bound, _block_sig(st.body))
    if isinstance(st, Cost):
        return ("cost", st.metric, st.amount)
    if isinstance(st, Return):
        return ("return", None if st.value is None else _expr_sig(st.value))
    if isinstance(st, TraceOn):
        return ("trace_on",)
    if isinstance(st, TraceOff):
        return ("trace_off",)
    if isinstance(st, ConcretizeAll):
        return ("concretize_all", st.var)
    raise TypeError(st)


def _block_sig(body: list[Stmt]):
    return tuple(_stmt_sig(s) for s in body)


def program_signature(p: Program):
    """Position/sid-free structural fingerprint of a program."""
    return (
        tuple((c.name, c.domain, c.default) for c in p.configs),
        tuple((i.name, i.domain) for i in p.inputs),
        tuple(
            (
                f.name,
                tuple((q.name, q.domain) for q in f.params),
                tuple(sorted(f.attrs)),
                f.ret_domain,
                _block_sig(f.body),
            )
            for f in p.functions
        ),
    )
