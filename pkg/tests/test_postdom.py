from __future__ import annotations

import random

import pytest

from conftest import corpus_path
from oracle import postdominates_by_paths
from violet.analysis import control_dependent, postdominates, postdominator_sets
from violet.diagnostics import AnalysisError
from violet.lang import ast, parse_file, parse_source
from violet.lang.cfg import CFG, CFGNode, lower_function


def build_cfg(edges: dict[int, list[int]], entry: int, exit_node: int) -> CFG:
    nodes = {}
    ids = set(edges) | {v for vs in edges.values() for v in vs} | {entry, exit_node}
    for nid in ids:
        nodes[nid] = CFGNode(nid, "block")
    for a, succs in edges.items():
        for b in succs:
            nodes[a].succs.append(b)
            nodes[b].preds.append(a)
    return CFG("synthetic", nodes, entry, exit_node, {}, [])


def random_cfg(rng: random.Random, n_nodes: int) -> CFG:
    """Random digraph where every node reaches the exit (last id)."""
    entry, exit_node = 0, n_nodes - 1
    edges: dict[int, list[int]] = {i: [] for i in range(n_nodes)}
    for i in range(n_nodes - 1):
        # guarantee exit reachability with a forward edge
        target = rng.randrange(i + 1, n_nodes)
        edges[i].append(target)
    extra = rng.randrange(n_nodes, 2 * n_nodes)
    for _ in range(extra):
        a = rng.randrange(0, n_nodes - 1)
        b = rng.randrange(0, n_nodes)
        if b != a and b not in edges[a]:
            edges[a].append(b)
    return build_cfg(edges, entry, exit_node)


def test_exit_postdominates_everything():
    cfg = build_cfg({0: [1], 1: [2, 3], 2: [4], 3: [4], 4: [5]}, 0, 5)
    for nid in cfg.nodes:
        assert postdominates(cfg, cfg.exit, nid)


def test_diamond_postdominance():
    # 0 -> 1(branch) -> 2/3 -> 4(merge) -> 5(exit)
    cfg = build_cfg({0: [1], 1: [2, 3], 2: [4], 3: [4], 4: [5]}, 0, 5)
    assert postdominates(cfg, 4, 1)  # merge postdominates the branch head
    assert not postdominates(cfg, 2, 1)  # a single arm does not
    assert postdominates(cfg, 2, 2)


def test_unknown_node_rejected():
    cfg = build_cfg({0: [1]}, 0, 1)
    with pytest.raises(AnalysisError):
        postdominates(cfg, 0, 99)


def test_random_cfg_against_path_oracle():
    rng = random.Random(12)
    cfg = random_cfg(rng, 12)
    succs = {nid: node.succs for nid, node in cfg.nodes.items()}
    for a in cfg.nodes:
        for b in cfg.nodes:
            expected = postdominates_by_paths(succs, cfg.exit, b, a)
            assert postdominates(cfg, b, a) == expected, (a, b)


def test_corpus_cfgs_against_path_oracle():
    from conftest import ALL_PROGRAMS
    from violet.lang.cfg import lower_program

    for name in ALL_PROGRAMS:
        program = parse_file(corpus_path(name))
        for cfg in lower_program(program).values():
            if len(cfg.nodes) > 16:
                continue
            succs = {nid: node.succs for nid, node in cfg.nodes.items()}
            for a in cfg.nodes:
                for b in cfg.nodes:
                    assert postdominates(cfg, b, a) == \
                        postdominates_by_paths(succs, cfg.exit, b, a), (name, cfg.fn, a, b)


def test_postdominance_is_an_order():
    rng = random.Random(77)
    for _ in range(10):
        cfg = random_cfg(rng, rng.randrange(4, 13))
        pd = postdominator_sets(cfg)
        nodes = list(cfg.nodes)
        for a in nodes:
            assert a in pd[a]  # reflexive
        for a in nodes:
            for b in pd[a]:
                # transitive: anything postdominating b postdominates a
                for c in pd[b]:
                    assert c in pd[a]
                # antisymmetric
                if a != b:
                    assert a not in pd[b] or a == b


# ---------------------------------------------------------------------------
# Control dependency, classic and broadened
# ---------------------------------------------------------------------------

def _stmt_of(program, fn_name, pred):
    for st in ast.walk_stmts(program.fn_map[fn_name].body):
        if pred(st):
            return st
    raise AssertionError("statement not found")


def test_chain_snippet_broadened():
    p = parse_file(corpus_path("chain_snippets.cfs"))
    cfg = lower_function(p.fn_map["chain_one"])
    if_a = _stmt_of(p, "chain_one",
                    lambda s: isinstance(s, ast.If) and "a" in ast.expr_vars(s.cond))
    if_c = _stmt_of(p, "chain_one",
                    lambda s: isinstance(s, ast.If) and "c" in ast.expr_vars(s.cond))
    if_d = _stmt_of(p, "chain_one",
                    lambda s: isinstance(s, ast.If) and "d" in ast.expr_vars(s.cond))
    if_b = _stmt_of(p, "chain_one",
                    lambda s: isinstance(s, ast.If) and "b" in ast.expr_vars(s.cond))
    # d's guard sits in the else-if arm: classic misses the a-dependency,
    # the chain rule catches it
    assert control_dependent(cfg, if_d.sid, if_a.sid)
    assert control_dependent(cfg, if_d.sid, if_c.sid)  # classic
    assert control_dependent(cfg, if_b.sid, if_c.sid)  # sibling arm, broadened
    assert control_dependent(cfg, if_b.sid, if_a.sid)  # classic


def test_combined_condition_classic():
    p = parse_file(corpus_path("chain_snippets.cfs"))
    cfg = lower_function(p.fn_map["combined_two"])
    outer = _stmt_of(p, "combined_two",
                     lambda s: isinstance(s, ast.If) and "a" in ast.expr_vars(s.cond))
    inner = _stmt_of(p, "combined_two",
                     lambda s: isinstance(s, ast.If) and "d" in ast.expr_vars(s.cond))
    assert control_dependent(cfg, inner.sid, outer.sid)


def test_straight_line_no_dependency():
    p = parse_source(
        "config a: bool = true;"
        "fn main() { cost latency 1; if (a != 0) { cost latency 2; } cost latency 3; }")
    cfg = lower_function(p.fn_map["main"])
    stmts = list(ast.walk_stmts(p.fn_map["main"].body))
    first, branch, last = stmts[0], stmts[1], stmts[3]
    # the statement after the merge is not dependent on the branch
    assert not control_dependent(cfg, last.sid, branch.sid)
    assert not control_dependent(cfg, first.sid, branch.sid)
    # a non-branch statement controls nothing
    assert not control_dependent(cfg, branch.sid, first.sid)


def test_unknown_statement_rejected():
    p = parse_source("config a: bool = true; fn main() { if (a != 0) { } }")
    cfg = lower_function(p.fn_map["main"])
    with pytest.raises(AnalysisError):
        control_dependent(cfg, 424242, 0)
