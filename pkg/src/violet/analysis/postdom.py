"""Postdominance and control dependency over function CFGs.

Node b postdominates node a when every path from a to the exit node
passes through b.  Control dependency uses the classic postdominator
formulation, broadened so that statements in sibling arms of one
if/else-if spine count as dependent on every condition of that spine.
"""

from __future__ import annotations

from functools import lru_cache

from ..diagnostics import AnalysisError
from ..lang.cfg import CFG


def postdominator_sets(cfg: CFG) -> dict[int, frozenset[int]]:
    """Iterative dataflow: pd(n) = {n} ∪ ⋂ pd(succ)."""
    all_nodes = frozenset(cfg.nodes)
    pd: dict[int, frozenset[int]] = {n: all_nodes for n in cfg.nodes}
    pd[cfg.exit] = frozenset({cfg.exit})
    changed = True
    while changed:
        changed = False
        for nid, node in cfg.nodes.items():
            if nid == cfg.exit:
                continue
            new = frozenset({nid})
            if node.succs:
                inter = pd[node.succs[0]]
                for s in node.succs[1:]:
                    inter = inter & pd[s]
                new = new | inter
            if new != pd[nid]:
                pd[nid] = new
                changed = True
    return pd


def postdominates(cfg: CFG, b: int, a: int) -> bool:
    """True iff every a→exit path contains b."""
    if a not in cfg.nodes or b not in cfg.nodes:
        raise AnalysisError(f"unknown CFG node ({a}, {b}) in {cfg.fn!r}")
    return b in postdominator_sets(cfg)[a]


def control_dependent_nodes(cfg: CFG, y: int, x: int) -> bool:
    """Classic node-level test: y depends on branch node x."""
    if x not in cfg.nodes or y not in cfg.nodes:
        raise AnalysisError(f"unknown CFG node ({x}, {y}) in {cfg.fn!r}")
    if x == y:
        return False
    pd = postdominator_sets(cfg)
    if y in pd[x]:
        return False
    return any(y in pd[s] for s in cfg.nodes[x].succs)


def control_dependent(cfg: CFG, y_sid: int, x_sid: int) -> bool:
    """Statement-level test; x must be a branch-condition statement.

    True under the classic definition, or when y sits in any arm of the
    if/else-if spine that contains x.
    """
    if x_sid not in cfg.stmt_node:
        raise AnalysisError(f"unknown statement {x_sid} in {cfg.fn!r}")
    if y_sid not in cfg.stmt_node:
        raise AnalysisError(f"unknown statement {y_sid} in {cfg.fn!r}")
    x_node = cfg.stmt_node[x_sid]
    if cfg.nodes[x_node].kind not in ("cond", "loop"):
        return False
    if control_dependent_nodes(cfg, cfg.stmt_node[y_sid], x_node):
        return True
    for chain in cfg.chains:
        if x_sid in chain.conds:
            if any(y_sid in arm for arm in chain.arm_stmts):
                return True
    return False


def clear_caches() -> None:  # pragma: no cover
    postdominator_sets.cache_clear()


# Postdominator sets are requested repeatedly per CFG during Algorithm-2
# walks; memoize on CFG identity.
postdominator_sets = lru_cache(maxsize=256)(postdominator_sets)  # type: ignore[assignment]
