"""Path constraints over finite domains.

Satisfiability is decided by bounded enumeration with early pruning (no
external solver): every symbolic variable ranges over a finite declared
domain and the per-query assignment product is capped.  Canonicalization
normalizes atoms to a variable-then-value form, drops atoms entailed by
the rest (domain seeds included), and sorts, which gives the syntactic
identity the cost-table and similarity counting are defined over.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..diagnostics import EngineError
from ..lang import ast
from ..lang.lexer import tokenize
from ..lang.parser import Parser
from .values import eval_concrete

ENUMERATION_CAP = 10 ** 6

DomainMap = dict[str, ast.Domain]


@dataclass(frozen=True)
class Atom:
    """One recorded branch decision: expr evaluated truthy (want=True) or not."""

    expr: ast.Expr
    want: bool = True
    seed: bool = False  # domain-range seed added by make_symbolic

    def holds(self, env: dict[str, int]) -> bool:
        return (eval_concrete(self.expr, env) != 0) == self.want


@dataclass
class PathConstraint:
    """Conjunction of branch decisions; the engine keeps it satisfiable."""

    atoms: list[Atom] = field(default_factory=list)

    def append(self, atom: Atom) -> None:
        self.atoms.append(atom)

    def remove(self, atom: Atom) -> None:
        self.atoms.remove(atom)

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __add__(self, more: list[Atom]) -> list[Atom]:
        return self.atoms + more

    def copy(self) -> "PathConstraint":
        return PathConstraint(list(self.atoms))

    def satisfied_by(self, env: dict[str, int]) -> bool:
        return all(a.holds(env) for a in self.atoms)


def atom_vars(atoms) -> set[str]:
    out: set[str] = set()
    for a in atoms:
        out |= ast.expr_vars(a.expr)
    return out


def _check_cap(domains: DomainMap, names: list[str]) -> None:
    product = 1
    for n in names:
        product *= domains[n].size()
        if product > ENUMERATION_CAP:
            raise EngineError(
                f"assignment space over {names} exceeds the enumeration cap "
                f"({ENUMERATION_CAP}); shrink domains or the symbolic set")


def _variable_components(atoms: list[Atom]) -> list[tuple[list[str], list[Atom]]]:
    """Group atoms into connected components by shared variables."""
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    per_atom_vars = [sorted(ast.expr_vars(a.expr)) for a in atoms]
    for vs in per_atom_vars:
        for v in vs:
            parent.setdefault(v, v)
        for v in vs[1:]:
            union(vs[0], v)
    groups: dict[str, tuple[set[str], list[Atom]]] = {}
    for i, (a, vs) in enumerate(zip(atoms, per_atom_vars)):
        if not vs:
            # constant atom: its own singleton component
            groups[f"#{i}"] = (set(), [a])
            continue
        root = find(vs[0])
        entry = groups.setdefault(root, (set(), []))
        entry[0].update(vs)
        entry[1].append(a)
    return [(sorted(vars_), atoms_) for vars_, atoms_ in
            (groups[k] for k in sorted(groups))]


def _component_satisfiable(names: list[str], atoms: list[Atom], domains: DomainMap) -> bool:
    _check_cap(domains, names)
    by_ready: list[list[Atom]] = [[] for _ in range(len(names) + 1)]
    pos = {n: i for i, n in enumerate(names)}
    for a in atoms:
        need = max((pos[v] + 1 for v in ast.expr_vars(a.expr)), default=0)
        by_ready[need].append(a)

    env: dict[str, int] = {}

    def rec(i: int) -> bool:
        for a in by_ready[i]:
            if not a.holds(env):
                return False
        if i == len(names):
            return True
        name = names[i]
        for v in domains[name].values():
            env[name] = v
            if rec(i + 1):
                return True
        del env[name]
        return False

    return rec(0)


def satisfiable(atoms, domains: DomainMap) -> bool:
    """True iff some in-domain assignment satisfies every atom.

    Domain seeds are implied by the enumeration itself, and atoms over
    disjoint variable sets are independent, so each connected component
    is decided on its own (the product cap applies per component).
    """
    atoms = [a for a in atoms if not a.seed]
    for n in atom_vars(atoms):
        if n not in domains:
            raise EngineError(f"atom references non-symbolic variable {n!r}")
    for names, component in _variable_components(atoms):
        if not _component_satisfiable(names, component, domains):
            return False
    return True


def assignments(atoms, domains: DomainMap,
                names: list[str] | None = None):
    """All satisfying assignments over the given variables, lexicographic
    in domain order (the listed variables are assigned even when the atoms
    do not mention them)."""
    atoms = [a for a in atoms if not a.seed]
    if names is None:
        names = sorted(n for n in atom_vars(atoms) if n in domains)
    _check_cap(domains, names)
    env: dict[str, int] = {}

    def rec(i: int):
        if i == len(names):
            if all(a.holds(env) for a in atoms
                   if ast.expr_vars(a.expr) <= set(names)):
                yield dict(env)
            return
        for v in domains[names[i]].values():
            env[names[i]] = v
            yield from rec(i + 1)
        env.pop(names[i], None)

    yield from rec(0)


def smallest_expr_value(atoms, domains: DomainMap, expr: ast.Expr) -> int | None:
    """Smallest value the expression can take under the constraint, in
    domain order; None when the constraint is unsatisfiable.

    Only the constraint components connected to the expression's
    variables are enumerated; disconnected components are checked for
    bare satisfiability.
    """
    atoms = [a for a in atoms if not a.seed]
    comps = _variable_components(atoms)
    relevant_names = set(ast.expr_vars(expr)) & set(domains)
    used = [False] * len(comps)
    changed = True
    while changed:
        changed = False
        for i, (names, _) in enumerate(comps):
            if not used[i] and set(names) & relevant_names:
                used[i] = True
                relevant_names |= set(names)
                changed = True
    relevant: list[Atom] = []
    for i, (names, comp_atoms) in enumerate(comps):
        if used[i]:
            relevant.extend(comp_atoms)
        elif not _component_satisfiable(names, comp_atoms, domains):
            return None
    best: int | None = None
    for env in assignments(relevant, domains, sorted(relevant_names)):
        v = eval_concrete(expr, env)
        if best is None or v < best:
            best = v
    return best


def implied(atoms, domains: DomainMap, candidate: Atom) -> bool:
    """True when every assignment satisfying `atoms` also satisfies `candidate`."""
    negated = Atom(candidate.expr, not candidate.want)
    return not satisfiable(atoms + [negated], domains)


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

_FLIP = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", "<=": ">", ">": "<="}


def _literal_text(v: ast.Expr) -> str | None:
    if isinstance(v, ast.IntLit):
        return str(v.value)
    if isinstance(v, ast.BoolLit):
        return "1" if v.value else "0"
    if isinstance(v, ast.EnumLit):
        return v.member
    return None


def _normalize(expr: ast.Expr, want: bool, domains: DomainMap) -> str:
    """Render one atom in canonical text form."""
    from ..lang.printer import print_expr

    if isinstance(expr, ast.Unary) and expr.op == "!":
        return _normalize(expr.operand, not want, domains)
    if isinstance(expr, ast.Var):
        # truthiness of a variable
        return f"{expr.name}!=0" if want else f"{expr.name}==0"
    if isinstance(expr, ast.Binary) and expr.op in ast.CMP_OPS:
        left, right, op = expr.left, expr.right, expr.op
        if _literal_text(left) is not None and isinstance(right, ast.Var):
            left, right = right, left
            op = {"<": ">", ">": "<", "<=": ">=", ">=": "<="}.get(op, op)
        if isinstance(left, ast.Var) and _literal_text(right) is not None:
            if not want:
                op = _FLIP[op]
            lit = right
            # bool-domain equalities against 0/1 collapse onto != 0 / == 0
            dom = domains.get(left.name)
            if isinstance(dom, ast.BoolDomain) and op in ("==", "!="):
                if isinstance(lit, ast.BoolLit):
                    v = 1 if lit.value else 0
                else:
                    v = lit.value if isinstance(lit, ast.IntLit) else None
                if v in (0, 1):
                    truthy = (v != 0) == (op == "==")
                    return f"{left.name}!=0" if truthy else f"{left.name}==0"
            return f"{left.name}{op}{_literal_text(lit)}"
    text = print_expr(expr)
    return text if want else f"!({text})"


@dataclass(frozen=True)
class CanonAtom:
    """Canonicalized atom: stable text plus the evaluable expression."""

    text: str
    expr: ast.Expr
    want: bool
    vars: tuple[str, ...]

    def holds(self, env: dict[str, int]) -> bool:
        return (eval_concrete(self.expr, env) != 0) == self.want


_OP_ORDER = ("==", "!=", ">", ">=", "<", "<=")
_SIMPLE_ATOM = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(==|!=|<=|>=|<|>)([A-Za-z0-9_-]+)$")


def _atom_sort_key(c: CanonAtom):
    """Variable, then operator class, then value; ranges read naturally."""
    m = _SIMPLE_ATOM.match(c.text)
    if m and len(c.vars) == 1 and m.group(1) == c.vars[0]:
        var, op, val = m.groups()
        try:
            vkey = (0, int(val), "")
        except ValueError:
            vkey = (1, 0, val)
        return (c.vars, 0, _OP_ORDER.index(op), vkey, c.text)
    return (c.vars, 1, 0, (0, 0, ""), c.text)


def canonicalize(atoms, domains: DomainMap) -> list[CanonAtom]:
    """Drop seeds and entailed atoms, normalize, dedup, sort.

    The returned atoms are rebuilt from their canonical text, so equal
    texts give structurally equal atoms no matter where they came from.
    """
    seen: dict[str, Atom] = {}
    order: list[str] = []
    for a in atoms:
        if a.seed:
            continue
        text = _normalize(a.expr, a.want, domains)
        if text not in seen:
            seen[text] = a
            order.append(text)
    dropped: set[str] = set()
    for text in order:
        rest = [seen[u] for u in order if u != text and u not in dropped]
        if rest and implied(rest, domains, seen[text]):
            dropped.add(text)
    shell = _EnumShell(domains)
    out = [parse_atom_text(t, shell) for t in order if t not in dropped]
    out.sort(key=_atom_sort_key)
    return out


class _EnumShell:
    """Just enough of a program for parse_atom_text: the member table."""

    def __init__(self, domains: DomainMap):
        self.enum_members: dict[str, ast.EnumDomain] = {}
        for dom in domains.values():
            if isinstance(dom, ast.EnumDomain):
                for m in dom.members:
                    self.enum_members[m] = dom


def canonical_text(canon: list[CanonAtom]) -> str:
    return " && ".join(c.text for c in canon)


# ---------------------------------------------------------------------------
# Re-parsing atom text (model/trace files round-trip through this)
# ---------------------------------------------------------------------------

def parse_atom_text(text: str, program_like) -> CanonAtom:
    """Parse one canonical atom line back into an evaluable atom.

    ``program_like`` needs ``enum_members`` mapping member -> EnumDomain.
    """
    want = True
    body = text.strip()
    if body.startswith("!(") and body.endswith(")"):
        want = False
        body = body[2:-1]
    toks = tokenize(body, "<atom>")
    parser = Parser(toks, "<atom>")
    expr = parser.parse_expr()
    if not parser.at("eof"):
        raise EngineError(f"trailing junk in atom {text!r}")

    members = program_like.enum_members

    def resolve(e: ast.Expr) -> ast.Expr:
        if isinstance(e, ast.Var) and e.name in members:
            return ast.EnumLit(e.name, members[e.name])
        if isinstance(e, ast.Unary):
            return ast.Unary(e.op, resolve(e.operand))
        if isinstance(e, ast.Binary):
            return ast.Binary(e.op, resolve(e.left), resolve(e.right))
        return e

    expr = resolve(expr)
    return CanonAtom(text.strip(), expr, want, tuple(sorted(ast.expr_vars(expr))))
