from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracle.py

from violet.engine import Budget, Engine, finalize_trace
from violet.lang import parse_file
from violet.model import build_model
from violet.pipeline import param_decls

CORPUS = Path(__file__).parent.parent / "corpus"

# Programs whose exploration is complete, so the brute-force oracle can
# reproduce it exactly.  Concretization (extern boundaries,
# concretize_all) deliberately trades coverage for tractability, which
# keeps those programs out of this list.
ORACLE_PROGRAMS = [
    "autocommit.cfs",
    "autocommit_v2.cfs",
    "bounded_loop.cfs",
    "chain_snippets.cfs",
    "independent.cfs",
    "log_buffer.cfs",
    "minimal.cfs",
    "mixed_domains.cfs",
    "nested_calls.cfs",
    "recursion.cfs",
    "trace_windows.cfs",
]

ALL_PROGRAMS = ORACLE_PROGRAMS + ["boundary_mix.cfs", "externs.cfs",
                                 "query_cache.cfs", "taint_copies.cfs"]


def corpus_path(name: str) -> Path:
    return CORPUS / name


@pytest.fixture(scope="session")
def mimic():
    return parse_file(CORPUS / "autocommit.cfs")


def default_config(program) -> dict[str, int]:
    return {c.name: c.default for c in program.configs}


def all_symbolic(program) -> set[str]:
    return {c.name for c in program.configs} | {i.name for i in program.inputs}


def explore_program(program, symbolic=None, config=None, budget=None):
    eng = Engine(program)
    return eng, eng.explore(config or default_config(program),
                            symbolic if symbolic is not None else all_symbolic(program),
                            budget or Budget())


def traces_of(engine, result):
    return [finalize_trace(engine.raw_trace(s)) for s in result.states]


def model_of(program, engine, result, *, target=None, related=None, threshold=100):
    traces = traces_of(engine, result)
    rel = related if related is not None else {c.name for c in program.configs}
    return build_model(traces, program, software=program.source_name,
                       target=target, related=rel, threshold_pct=threshold,
                       params=param_decls(program))


@pytest.fixture(scope="session")
def mimic_run(mimic):
    eng, res = explore_program(
        mimic, symbolic={"autocommit", "flush_at_trx_commit", "binlog_format", "sql_command"})
    return eng, res


@pytest.fixture(scope="session")
def mimic_model(mimic, mimic_run):
    eng, res = mimic_run
    return model_of(mimic, eng, res, target="autocommit",
                    related={"binlog_format", "flush_at_trx_commit"})
