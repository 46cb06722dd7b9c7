from __future__ import annotations

import pytest

from conftest import corpus_path, explore_program, model_of
from violet.checker import (
    check_default,
    check_evolution,
    check_update,
    generate_test_case,
    locate_rows,
)
from violet.diagnostics import CheckError
from violet.lang import parse_file
from violet.model import load_model, serialize_model


@pytest.fixture(scope="module")
def v2_model():
    program = parse_file(corpus_path("autocommit_v2.cfs"))
    eng, res = explore_program(
        program, symbolic={"autocommit", "flush_at_trx_commit", "binlog_format",
                           "sql_command"})
    return model_of(program, eng, res, target="autocommit",
                    related={"binlog_format", "flush_at_trx_commit"})


OLD = {"autocommit": 0, "flush_at_trx_commit": 1, "binlog_format": 0}
NEW = {"autocommit": 1, "flush_at_trx_commit": 1, "binlog_format": 0}


# ---------------------------------------------------------------------------
# locate_rows
# ---------------------------------------------------------------------------

def test_locate_rows_specific(mimic_model):
    rows = locate_rows(mimic_model, NEW)
    # the two states of the autocommit!=0 && flush==1 class
    assert {r.constraint_text for r in rows} == {"autocommit!=0 && flush_at_trx_commit==1"}
    assert len(rows) == 2


def test_locate_rows_unconstrained_variable(mimic_model):
    for flush in (0, 1, 2):
        rows = locate_rows(mimic_model, {"autocommit": 0, "flush_at_trx_commit": flush,
                                         "binlog_format": 0})
        assert {r.constraint_text for r in rows} == {"autocommit==0"}


def test_locate_rows_with_mixed_atoms():
    """Flagged config/input atoms cannot be decided by the config alone
    and must not drop candidate rows (or crash)."""
    from conftest import corpus_path, explore_program, model_of
    from violet.lang import parse_file

    program = parse_file(corpus_path("mixed_domains.cfs"))
    eng, res = explore_program(program)
    model = model_of(program, eng, res)
    assert any(r.mixed_flagged for r in model.rows)
    rows = locate_rows(model, {"threads": 0, "algo": 0})  # threads=1, LZ4
    assert rows  # the mixed-atom rows stay in play
    assert any(r.mixed_flagged for r in rows)


def test_locate_rows_empty_model(mimic):
    from violet.model import build_model
    from violet.pipeline import param_decls
    empty = build_model([], mimic, software="x", target=None, related=set(),
                        threshold_pct=100, params=param_decls(mimic))
    assert locate_rows(empty, NEW) == []


# ---------------------------------------------------------------------------
# Mode 1
# ---------------------------------------------------------------------------

def test_update_regression_flagged(mimic_model):
    report = check_update(mimic_model, OLD, NEW)
    assert report.verdict == "specious"
    assert report.exit_code == 2
    # the generated test case satisfies the slow row's predicate
    assert report.test_case == {"sql_command": 0}  # INSERT
    slow = mimic_model.row_by_id(report.evidence[0].slow_id)
    assert all(a.holds(report.test_case) for a in slow.input_atoms)
    # the cited rows reproduce the ratio exactly
    ev = report.evidence[0]
    srow = mimic_model.row_by_id(ev.slow_id)
    frow = mimic_model.row_by_id(ev.fast_id)
    assert srow.cost.get(ev.metric) == ev.slow_value
    assert frow.cost.get(ev.metric) == ev.fast_value


def test_update_identity_is_ok(mimic_model):
    assert check_update(mimic_model, NEW, dict(NEW)).verdict == "ok"


def test_update_cheaper_is_ok(mimic_model):
    report = check_update(mimic_model, NEW, OLD)  # turning autocommit off
    assert report.verdict == "ok"


def test_update_threshold_monotone(mimic_model):
    # raising the threshold can only flip specious -> ok
    verdicts = [check_update(mimic_model, OLD, NEW, threshold_pct=t).verdict
                for t in (25, 50, 100, 200, 400, 100000)]
    seen_ok = False
    for v in verdicts:
        if v == "ok":
            seen_ok = True
        if seen_ok:
            assert v == "ok"


def test_update_invalid_value_rejected(mimic_model):
    from violet.checker import full_config
    with pytest.raises(CheckError):
        full_config(mimic_model, {"flush_at_trx_commit": 9})


# ---------------------------------------------------------------------------
# Mode 2
# ---------------------------------------------------------------------------

def test_default_flagged(mimic_model):
    # declared defaults: autocommit=true, flush=1 -> slow side
    report = check_default(mimic_model)
    assert report.verdict == "specious"
    assert report.test_case == {"sql_command": 0}


def test_default_overridden_to_fast_is_ok(mimic_model):
    report = check_default(mimic_model, {"autocommit": 0})
    assert report.verdict == "ok"


def test_default_unknown_parameter(mimic_model):
    report = check_default(mimic_model, {"no_such_knob": 1})
    assert report.verdict == "outside-explored-space"
    assert report.exit_code == 3


# ---------------------------------------------------------------------------
# Mode 3
# ---------------------------------------------------------------------------

def test_evolution_same_model_ok(mimic_model):
    assert check_evolution(mimic_model, mimic_model).verdict == "ok"


def test_evolution_code_upgrade_flagged(mimic_model, v2_model):
    report = check_evolution(mimic_model, v2_model)
    assert report.verdict == "specious"
    ev = report.evidence[0]
    new_rep = v2_model.row_by_id(ev.slow_id)
    old_rep = mimic_model.row_by_id(ev.fast_id)
    assert new_rep.constraint_text == old_rep.constraint_text
    assert new_rep.cost.latency == 5300 and old_rep.cost.latency == 2600


def test_evolution_workload_shift_flagged(mimic_model):
    report = check_evolution(mimic_model, mimic_model,
                             old_workload="sql_command==SELECT",
                             new_workload="sql_command==INSERT",
                             config=NEW)
    assert report.verdict == "specious"
    assert report.test_case == {"sql_command": 0}


def test_evolution_workload_shift_reverse_is_ok(mimic_model):
    report = check_evolution(mimic_model, mimic_model,
                             old_workload="sql_command==INSERT",
                             new_workload="sql_command==SELECT",
                             config=NEW)
    assert report.verdict == "ok"


def test_evolution_round_tripped_models(mimic_model, v2_model):
    old = load_model(serialize_model(mimic_model))
    new = load_model(serialize_model(v2_model))
    assert check_evolution(old, new).verdict == "specious"


# ---------------------------------------------------------------------------
# Test-case generation
# ---------------------------------------------------------------------------

def _atoms(texts, model):
    from violet.engine.constraints import parse_atom_text
    return [parse_atom_text(t, model) for t in texts]


def test_generate_simple(mimic_model):
    tc = generate_test_case(_atoms(["sql_command==INSERT"], mimic_model), mimic_model)
    assert tc == {"sql_command": 0}


def test_generate_empty_predicate_all_smallest(mimic_model):
    assert generate_test_case([], mimic_model) == {"sql_command": 0}


def test_generate_range_witness():
    from violet.model import ImpactModel, ParamDecl
    from violet.lang import ast
    model = ImpactModel("x", None, [], 100,
                        [ParamDecl("input", "n", ast.IntDomain(0, 10), None)],
                        [], [], [], {})
    tc = generate_test_case(_atoms(["n>3", "n<6"], model), model)
    assert tc == {"n": 4}


def test_generate_unsat_predicate(mimic_model):
    with pytest.raises(CheckError):
        generate_test_case(_atoms(["sql_command==INSERT", "sql_command==SELECT"],
                                  mimic_model), mimic_model)


def test_generate_rejects_config_atoms(mimic_model):
    with pytest.raises(CheckError):
        generate_test_case(_atoms(["autocommit!=0"], mimic_model), mimic_model)


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def test_report_render_and_serialize(mimic_model):
    report = check_update(mimic_model, OLD, NEW)
    text = report.render(mimic_model)
    assert "specious" in text
    assert "test case: sql_command=INSERT" in text
    ser = report.serialize()
    assert ser.startswith("violet-report v1\n")
    assert "verdict specious" in ser
