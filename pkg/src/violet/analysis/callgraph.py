"""Call-graph construction and entry-to-function chain enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lang import ast

MAX_CHAIN_DEPTH = 32


@dataclass
class CallGraph:
    nodes: list[str]
    edges: list[tuple[str, str, int]]  # (caller, callee, callsite sid)
    by_caller: dict[str, list[tuple[str, int]]] = field(init=False)

    def __post_init__(self) -> None:
        self.by_caller = {n: [] for n in self.nodes}
        for caller, callee, sid in self.edges:
            self.by_caller[caller].append((callee, sid))

    def paths(self, entry: str, target: str) -> list[tuple[tuple[str, int], ...]]:
        """All call chains entry→target as ((caller, callsite sid), ...).

        The last element's callee is the target.  Each function appears at
        most once per chain (cycles are walked once) and chains are capped
        at MAX_CHAIN_DEPTH edges.
        """
        if target == entry:
            return [()]
        out: list[tuple[tuple[str, int], ...]] = []

        def dfs(fn: str, chain: list[tuple[str, int]], on_path: set[str]) -> None:
            if len(chain) >= MAX_CHAIN_DEPTH:
                return
            for callee, sid in self.by_caller.get(fn, []):
                if callee == target:
                    out.append(tuple(chain + [(fn, sid)]))
                if callee in on_path or callee == target:
                    continue
                on_path.add(callee)
                chain.append((fn, sid))
                dfs(callee, chain, on_path)
                chain.pop()
                on_path.remove(callee)

        dfs(entry, [], {entry})
        return out


def build_call_graph(program: ast.Program) -> CallGraph:
    nodes = [f.name for f in program.functions]
    edges: list[tuple[str, str, int]] = []
    for fn in program.functions:
        for st in ast.walk_stmts(fn.body):
            if isinstance(st, ast.CallStmt):
                edges.append((fn.name, st.name, st.sid))
            elif isinstance(st, ast.Assign) and isinstance(st.value, ast.CallExpr):
                edges.append((fn.name, st.value.name, st.sid))
    return CallGraph(nodes, edges)
