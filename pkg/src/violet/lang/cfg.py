"""Per-function control-flow graphs.

Each function lowers to a CFG with one entry node and one exit node;
every statement lands in exactly one node.  ``while`` expands into a
loop-head (holding the condition), the body subgraph with a back edge,
and an after node.  If/else-if spines are additionally recorded as
condition chains, which the broadened control-dependency test uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast


@dataclass
class CFGNode:
    id: int
    kind: str  # "entry" | "exit" | "block" | "cond" | "loop" | "merge"
    stmts: list[int] = field(default_factory=list)
    succs: list[int] = field(default_factory=list)
    preds: list[int] = field(default_factory=list)


@dataclass
class Chain:
    """An if/else-if spine: condition sids plus the statements of each arm."""

    conds: list[int]
    cond_stmts: list[ast.If]
    arm_stmts: list[frozenset[int]]  # one set per then-arm, plus the final else arm


@dataclass(eq=False)  # identity semantics; postdominator sets memoize on it
class CFG:
    fn: str
    nodes: dict[int, CFGNode]
    entry: int
    exit: int
    stmt_node: dict[int, int]
    chains: list[Chain]

    def node_of(self, sid: int) -> int:
        return self.stmt_node[sid]


class _Builder:
    def __init__(self, fn: ast.FunctionDef):
        self.fn = fn
        self.nodes: dict[int, CFGNode] = {}
        self.stmt_node: dict[int, int] = {}
        self.next_id = 0

    def new(self, kind: str) -> CFGNode:
        n = CFGNode(self.next_id, kind)
        self.nodes[n.id] = n
        self.next_id += 1
        return n

    def edge(self, a: CFGNode, b: CFGNode) -> None:
        a.succs.append(b.id)
        b.preds.append(a.id)

    def put(self, node: CFGNode, sid: int) -> None:
        node.stmts.append(sid)
        self.stmt_node[sid] = node.id

    def branch_node(self, cur: CFGNode, kind: str, sid: int) -> CFGNode:
        """Node for a condition; reuses `cur` when it is an empty plain block."""
        if cur.kind == "block" and not cur.stmts:
            cur.kind = kind
            self.put(cur, sid)
            return cur
        node = self.new(kind)
        self.put(node, sid)
        self.edge(cur, node)
        return node

    def build(self) -> CFG:
        entry = self.new("entry")
        self.exit_node = self.new("exit")
        first = self.new("block")
        self.edge(entry, first)
        last = self.block(self.fn.body, first)
        if last is not None:
            self.edge(last, self.exit_node)
        chains: list[Chain] = []
        _collect_chains(self.fn.body, chains)
        return CFG(self.fn.name, self.nodes, entry.id, self.exit_node.id,
                   self.stmt_node, chains)

    def block(self, body: list[ast.Stmt], cur: CFGNode) -> CFGNode | None:
        """Lower one statement list; returns the fall-through node or None."""
        for st in body:
            if isinstance(st, ast.If):
                cond = self.branch_node(cur, "cond", st.sid)
                then_start = self.new("block")
                self.edge(cond, then_start)
                then_end = self.block(st.then_body, then_start)
                else_start = self.new("block")
                self.edge(cond, else_start)
                else_end = self.block(st.else_body, else_start)
                if then_end is None and else_end is None:
                    return None
                merge = self.new("merge")
                if then_end is not None:
                    self.edge(then_end, merge)
                if else_end is not None:
                    self.edge(else_end, merge)
                cur = merge
            elif isinstance(st, ast.While):
                head = self.branch_node(cur, "loop", st.sid)
                body_start = self.new("block")
                self.edge(head, body_start)
                body_end = self.block(st.body, body_start)
                if body_end is not None:
                    self.edge(body_end, head)
                after = self.new("merge")
                self.edge(head, after)
                cur = after
            elif isinstance(st, ast.Return):
                self.put(cur, st.sid)
                self.edge(cur, self.exit_node)
                return None
            else:
                self.put(cur, st.sid)
        return cur


def _collect_chains(body: list[ast.Stmt], out: list[Chain]) -> None:
    for st in body:
        if isinstance(st, ast.If):
            spine = [st]
            cur = st
            while len(cur.else_body) == 1 and isinstance(cur.else_body[0], ast.If):
                cur = cur.else_body[0]
                spine.append(cur)
            arms = []
            for link in spine:
                arms.append(frozenset(s.sid for s in ast.walk_stmts(link.then_body)))
            arms.append(frozenset(s.sid for s in ast.walk_stmts(cur.else_body)))
            out.append(Chain([s.sid for s in spine], spine, arms))
            for link in spine:
                _collect_chains(link.then_body, out)
            _collect_chains(cur.else_body, out)
        elif isinstance(st, ast.While):
            _collect_chains(st.body, out)


def lower_function(fn: ast.FunctionDef) -> CFG:
    return _Builder(fn).build()


def lower_program(program: ast.Program) -> dict[str, CFG]:
    """CFGs for every non-extern function, keyed by name."""
    return {f.name: lower_function(f) for f in program.functions if not f.is_extern}
