from __future__ import annotations

import pytest

from conftest import (
    ORACLE_PROGRAMS,
    all_symbolic,
    corpus_path,
    default_config,
    explore_program,
)
from oracle import brute_force_groups
from violet.diagnostics import EngineError
from violet.engine import Budget, Engine, assignments, canonicalize
from violet.lang import parse_file, parse_source

_ORACLE_METRICS = ("latency", "instructions", "syscalls", "file_io_ops",
                   "io_bytes", "sync_ops", "net_ops")


def _domains(program):
    out = {}
    for c in program.configs:
        out[c.name] = c.domain
    for i in program.inputs:
        out[i.name] = i.domain
    return out


def _class_members(program, state, engine):
    """All in-domain assignments satisfying a state's path constraint."""
    doms = _domains(program)
    names = sorted(doms)
    return frozenset(
        frozenset(env.items())
        for env in assignments(state.constraint, doms, names)
    )


# ---------------------------------------------------------------------------
# make_symbolic
# ---------------------------------------------------------------------------

def test_make_symbolic_seeds_domain_atoms(mimic):
    eng = Engine(mimic)
    res = eng.explore(default_config(mimic), {"autocommit"},
                      input_values={"sql_command": 0})
    st = res.states[0]
    seeds = [a for a in st.constraint if a.seed]
    assert len(seeds) == 1  # one range atom for the one bool target


def test_make_symbolic_three_targets(mimic):
    eng = Engine(mimic)
    res = eng.explore(default_config(mimic),
                      {"autocommit", "flush_at_trx_commit", "sql_command"})
    st = res.states[0]
    assert len({n for n in st.domains}) == 3
    assert len([a for a in st.constraint if a.seed]) == 3


def test_empty_symbolic_set_is_concrete_run(mimic):
    eng = Engine(mimic)
    res = eng.explore(default_config(mimic), set(), input_values={"sql_command": 0})
    assert len(res.states) == 1
    assert res.states[0].status == "terminated"
    assert not [a for a in res.states[0].constraint if not a.seed]


def test_unknown_symbolic_name(mimic):
    with pytest.raises(EngineError):
        Engine(mimic).explore(default_config(mimic), {"nope"})


def test_unsat_initial_config(mimic):
    bad = dict(default_config(mimic))
    bad["flush_at_trx_commit"] = 9
    with pytest.raises(EngineError):
        Engine(mimic).explore(bad, {"autocommit"}, input_values={"sql_command": 0})


def test_missing_input_value(mimic):
    with pytest.raises(EngineError):
        Engine(mimic).explore(default_config(mimic), {"autocommit"})


# ---------------------------------------------------------------------------
# The mimic's constraint classes
# ---------------------------------------------------------------------------

def test_mimic_constraint_classes(mimic):
    eng, res = explore_program(
        mimic, symbolic={"autocommit", "flush_at_trx_commit", "sql_command"})
    classes = set()
    for st in res.states:
        config_atoms = [c.text for c in canonicalize(st.constraint, st.domains)
                        if "sql_command" not in c.vars]
        classes.add(" && ".join(config_atoms))
    assert classes == {
        "autocommit!=0 && flush_at_trx_commit==1",
        "autocommit!=0 && flush_at_trx_commit==2",
        "autocommit!=0 && flush_at_trx_commit!=1 && flush_at_trx_commit!=2",
        "autocommit==0",
    }


def test_mimic_with_binlog_has_same_classes(mimic, mimic_run):
    _, res = mimic_run  # binlog_format symbolic too, but never branched on
    assert len(res.states) == 8


# ---------------------------------------------------------------------------
# Oracle equivalence, disjointness, coverage
# ---------------------------------------------------------------------------

def assert_oracle_equivalent(program, label=""):
    sizes = 1
    for dom in _domains(program).values():
        sizes *= dom.size()
    assert sizes <= 10 ** 4, f"{label} exceeds the oracle budget"
    eng, res = explore_program(program)
    symbolic: dict = {}
    for st in res.states:
        members = _class_members(program, st, eng)
        cost = {m: st.cost_totals.get(m, 0) for m in _ORACLE_METRICS}
        assert members not in symbolic, "constraint classes must be disjoint"
        symbolic[members] = cost
    oracle = {members: cost for members, cost in brute_force_groups(program).values()}
    assert set(symbolic) == set(oracle), f"{label}: class partition differs"
    for members in symbolic:
        assert symbolic[members] == oracle[members], f"{label}: cost mismatch"


@pytest.mark.parametrize("name", ORACLE_PROGRAMS)
def test_oracle_equivalence(name):
    assert_oracle_equivalent(parse_file(corpus_path(name)), name)


def test_oracle_equivalence_return_in_loop():
    src = (
        "config k: int in [0, 4] = 2;"
        "fn main() {"
        "  i := 0;"
        "  while (i < k) bound 4 {"
        "    if (i == 2) { return; }"
        "    cost latency 10;"
        "    i := i + 1;"
        "  }"
        "  cost latency 1;"
        "}")
    assert_oracle_equivalent(parse_source(src), "return-in-loop")


def test_oracle_equivalence_early_return_value():
    src = (
        "config k: int in [0, 3] = 1;"
        "fn main() {"
        "  v := pick();"
        "  if (v > 1) { cost latency 7; }"
        "}"
        "fn pick() {"
        "  if (k == 0) { return 5; }"
        "  cost latency 2;"
        "  return k - 1;"
        "}")
    assert_oracle_equivalent(parse_source(src), "early-return-value")


@pytest.mark.parametrize("name", ORACLE_PROGRAMS)
def test_disjoint_and_covering(name):
    program = parse_file(corpus_path(name))
    eng, res = explore_program(program)
    seen: set = set()
    total = 0
    for st in res.states:
        members = _class_members(program, st, eng)
        assert not (seen & members), f"{name}: overlapping classes"
        seen |= members
        total += len(members)
    universe = 1
    for dom in _domains(program).values():
        universe *= dom.size()
    assert total == universe, f"{name}: classes do not cover the space"


@pytest.mark.parametrize("name", ORACLE_PROGRAMS)
def test_every_constraint_feasible(name):
    program = parse_file(corpus_path(name))
    eng, res = explore_program(program)
    for st in res.states:
        assert _class_members(program, st, eng), "emitted an unsatisfiable constraint"


def test_determinism_byte_for_byte(mimic):
    import io

    def run_once():
        eng, res = explore_program(mimic)
        chunks = []
        for st in res.states:
            raw = eng.raw_trace(st)
            chunks.append((st.sid, raw.atom_texts,
                           [(c.cid, c.eip, c.return_address, c.timestamp) for c in raw.calls],
                           [(r.return_address, r.timestamp) for r in raw.returns],
                           dict(raw.totals)))
        return chunks

    assert run_once() == run_once()


def test_state_ids_assigned_in_fork_order(mimic, mimic_run):
    _, res = mimic_run
    sids = sorted(st.sid for st in res.states)
    assert sids == list(range(len(res.states)))


# ---------------------------------------------------------------------------
# Budgets
# ---------------------------------------------------------------------------

def test_max_states_budget(mimic):
    eng = Engine(mimic)
    res = eng.explore(default_config(mimic), all_symbolic(mimic),
                      Budget(max_states=3))
    assert res.budget_exhausted
    assert len(res.states) <= 3  # forks beyond the cap are dropped, flagged
    assert sorted(s.sid for s in res.states) == list(range(len(res.states)))


def test_max_latency_budget():
    p = parse_source(
        "config n: int in [0, 3] = 1;"
        "fn main() { i := 0; while (i < n) bound 3 { cost latency 100; i := i + 1; } }")
    eng = Engine(p)
    res = eng.explore({"n": 1}, {"n"}, Budget(max_latency_per_state=150))
    over = [s for s in res.states if s.status == "budget-exceeded"]
    assert over
    # the constraint of the stopped state is still recorded
    for s in over:
        assert s.constraint


def test_max_steps_budget(mimic):
    eng = Engine(mimic)
    res = eng.explore(default_config(mimic), all_symbolic(mimic), Budget(max_steps=10))
    assert res.budget_exhausted
    assert all(s.status in ("terminated", "budget-exceeded") for s in res.states)


# ---------------------------------------------------------------------------
# Loops
# ---------------------------------------------------------------------------

def test_enumeration_cap_is_per_query():
    # two maximal domains; branches touch one variable at a time, so no
    # query ever spans the full product
    p = parse_source(
        "config a: int in [0, 4095] = 0;"
        "config b: int in [0, 4095] = 0;"
        "fn main() { if (a > 100) { cost latency 1; } if (b > 7) { cost latency 2; } }")
    eng, res = explore_program(p)
    assert len(res.states) == 4


def test_enumeration_cap_triggers_on_joint_query():
    p = parse_source(
        "config a: int in [0, 4095] = 0;"
        "config b: int in [0, 4095] = 0;"
        "fn main() { if (a + b > 5000) { cost latency 1; } }")
    with pytest.raises(EngineError, match="enumeration cap"):
        explore_program(p)


def test_bounded_loop_classes():
    p = parse_file(corpus_path("bounded_loop.cfs"))
    eng, res = explore_program(p)
    by_class = {}
    for st in res.states:
        text = " && ".join(c.text for c in canonicalize(st.constraint, st.domains))
        by_class[text] = st.cost_totals.get("latency", 0)
    assert by_class == {
        "retries<=0": 10,
        "retries>0 && retries<=1": 110,
        "retries>1 && retries<=2": 210,
        "retries>2": 310,
    }


def test_path_constraint_satisfied_by_class_members(mimic, mimic_run):
    _, res = mimic_run
    doms = _domains(mimic)
    for st in res.states:
        count = 0
        for env in assignments(st.constraint, doms, sorted(doms)):
            assert st.constraint.satisfied_by(env)
            count += 1
        assert count > 0
