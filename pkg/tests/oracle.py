"""Independent oracles used by the test suite.

The concrete interpreter here deliberately shares nothing with the
symbolic engine except the parsed syntax tree: it evaluates one fully
concrete assignment at a time, recording the branch decisions (the path
signature) and the cost totals.  Brute-force enumeration over all
in-domain assignments, grouped by path signature, is the ground truth
the symbolic exploration is checked against.

Also here: all-simple-paths postdominance and a textbook LCS table.
"""

from __future__ import annotations


from dataclasses import dataclass

from violet.lang import ast

_METRICS = ("latency", "instructions", "syscalls", "file_io_ops",
            "io_bytes", "sync_ops", "net_ops")


@dataclass
class ConcreteRun:
    signature: tuple
    cost: dict[str, int]
    clock: int


class _Interp:
    def __init__(self, program: ast.Program, assignment: dict[str, int]):
        self.p = program
        self.assignment = assignment
        self.sig: list = []
        self.cost = {m: 0 for m in _METRICS}
        self.clock = 0
        self.tracing = True

    def run(self) -> ConcreteRun:
        self.call(self.p.fn_map[self.p.entry], [])
        return ConcreteRun(tuple(self.sig), dict(self.cost), self.clock)

    def call(self, fn: ast.FunctionDef, args: list[int]):
        if fn.is_extern:
            # pure/benign/plain behave alike on concrete arguments:
            # deterministic smallest return value
            if fn.ret_domain is not None:
                return next(iter(fn.ret_domain.values()))
            return None
        env = dict(zip((q.name for q in fn.params), args))
        return self.block(fn.body, env)

    def block(self, body: list[ast.Stmt], env: dict):
        for st in body:
            done, value = self.stmt(st, env)
            if done:
                return value
        return None

    def instr(self) -> None:
        if self.tracing:
            self.cost["instructions"] += 1

    def stmt(self, st: ast.Stmt, env: dict):
        self.instr()
        if isinstance(st, ast.Cost):
            if st.metric == "latency":
                self.clock += st.amount
            if self.tracing:
                self.cost[st.metric] += st.amount
            return False, None
        if isinstance(st, ast.TraceOn):
            self.tracing = True
            return False, None
        if isinstance(st, ast.TraceOff):
            self.tracing = False
            return False, None
        if isinstance(st, ast.ConcretizeAll):
            return False, None  # everything is already concrete here
        if isinstance(st, ast.Assign):
            if isinstance(st.value, ast.CallExpr):
                callee = self.p.fn_map[st.value.name]
                args = [self.eval(a, env) for a in st.value.args]
                env[st.target] = self.call(callee, args)
            else:
                env[st.target] = self.eval(st.value, env)
            return False, None
        if isinstance(st, ast.CallStmt):
            callee = self.p.fn_map[st.name]
            args = [self.eval(a, env) for a in st.args]
            self.call(callee, args)
            return False, None
        if isinstance(st, ast.Return):
            value = self.eval(st.value, env) if st.value is not None else None
            return True, value
        if isinstance(st, ast.If):
            taken = self.eval(st.cond, env) != 0
            self.sig.append((st.sid, taken))
            return self._run_block(st.then_body if taken else st.else_body, env)
        if isinstance(st, ast.While):
            remaining = st.bound
            while True:
                if remaining == 0:
                    # bound exhausted: the re-check itself was already counted
                    return False, None
                taken = self.eval(st.cond, env) != 0
                self.sig.append((st.sid, taken))
                if not taken:
                    return False, None
                remaining -= 1
                done, value = self._run_block(st.body, env)
                if done:
                    return True, value
                self.instr()  # the next condition check
        raise TypeError(st)

    def _run_block(self, body: list[ast.Stmt], env: dict):
        for s in body:
            done, value = self.stmt(s, env)
            if done:
                return True, value
        return False, None

    def eval(self, e: ast.Expr, env: dict) -> int:
        if isinstance(e, ast.IntLit):
            return e.value
        if isinstance(e, ast.BoolLit):
            return 1 if e.value else 0
        if isinstance(e, ast.EnumLit):
            return e.value
        if isinstance(e, ast.Var):
            if e.name in env:
                return env[e.name]
            return self.assignment[e.name]
        if isinstance(e, ast.Unary):
            return 0 if self.eval(e.operand, env) != 0 else 1
        if isinstance(e, ast.Binary):
            a, b = self.eval(e.left, env), self.eval(e.right, env)
            return {
                "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
                "==": lambda: int(a == b), "!=": lambda: int(a != b),
                "<": lambda: int(a < b), "<=": lambda: int(a <= b),
                ">": lambda: int(a > b), ">=": lambda: int(a >= b),
                "&&": lambda: int(a != 0 and b != 0),
                "||": lambda: int(a != 0 or b != 0),
            }[e.op]()
        raise TypeError(e)


def run_concrete(program: ast.Program, assignment: dict[str, int]) -> ConcreteRun:
    return _Interp(program, assignment).run()


def all_assignments(program: ast.Program):
    """Every in-domain (config ∪ input) assignment, lexicographic."""
    names: list[str] = [c.name for c in program.configs] + [i.name for i in program.inputs]
    domains = [program.domain_of(n) for n in names]

    def rec(i: int, env: dict):
        if i == len(names):
            yield dict(env)
            return
        for v in domains[i].values():
            env[names[i]] = v
            yield from rec(i + 1, env)

    yield from rec(0, {})


def brute_force_groups(program: ast.Program):
    """Map path signature -> (frozenset of assignment items, cost dict)."""
    groups: dict[tuple, list] = {}
    for assignment in all_assignments(program):
        run = run_concrete(program, assignment)
        entry = groups.setdefault(run.signature, [set(), run.cost])
        entry[0].add(frozenset(assignment.items()))
        assert entry[1] == run.cost, "cost must be path-determined"
    return {sig: (frozenset(members), cost) for sig, (members, cost) in groups.items()}


# ---------------------------------------------------------------------------
# Postdominance by exhaustive simple-path enumeration
# ---------------------------------------------------------------------------

def postdominates_by_paths(succs: dict[int, list[int]], exit_node: int,
                           b: int, a: int) -> bool:
    """True iff every simple path a -> exit contains b."""
    if a == b:
        return True

    def dfs(node: int, seen: frozenset) -> bool:
        """True if some b-free simple path from node reaches the exit."""
        if node == b:
            return False
        if node == exit_node:
            return True
        for nxt in succs.get(node, []):
            if nxt not in seen and dfs(nxt, seen | {nxt}):
                return True
        return False

    return not dfs(a, frozenset({a}))


# ---------------------------------------------------------------------------
# Textbook LCS length
# ---------------------------------------------------------------------------

def lcs_length(xs, ys) -> int:
    m, n = len(xs), len(ys)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if xs[i - 1] == ys[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[m][n]
