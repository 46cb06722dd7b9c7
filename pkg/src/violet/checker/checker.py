"""Specious-configuration checker.

Three modes against an impact model:
  1. a config update regresses performance (old file vs new file),
  2. a default value lands in the slow side of a suspicious pair,
  3. a code upgrade (new model vs old model) or a workload shift makes
     the current setting poor.

Every specious verdict cites concrete cost-table rows; re-evaluating the
cited rows reproduces the ratio exactly.  A config that matches no
explored row yields an explicit outside-explored-space outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from ..configio import parse_settings
from ..diagnostics import CheckError, VioletError
from ..engine.constraints import CanonAtom, parse_atom_text
from ..lang import ast
from ..model.cost import METRICS
from ..model.table import CostTableRow, ImpactModel, ratio_exceeds

OK = "ok"
SPECIOUS = "specious"
OUTSIDE = "outside-explored-space"

EXIT_CODES = {OK: 0, SPECIOUS: 2, OUTSIDE: 3}


@dataclass
class Evidence:
    slow_id: int
    fast_id: int
    metric: str
    slow_value: int
    fast_value: int
    critical_chain: list[str] = field(default_factory=list)

    def render_ratio(self) -> str:
        if self.fast_value == 0:
            return "inf"
        return f"{(self.slow_value - self.fast_value) * 100.0 / self.fast_value:.1f}%"


@dataclass
class CheckReport:
    mode: int
    verdict: str
    evidence: list[Evidence] = field(default_factory=list)
    test_case: dict[str, int] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def render(self, model: ImpactModel | None = None) -> str:
        out = [f"mode {self.mode}: {self.verdict}"]
        for ev in self.evidence:
            line = (f"  slow state {ev.slow_id} vs fast state {ev.fast_id}: "
                    f"{ev.metric} {ev.slow_value} vs {ev.fast_value} (+{ev.render_ratio()})")
            out.append(line)
            if ev.critical_chain:
                out.append(f"  critical path: {'->'.join(ev.critical_chain)}")
        if self.test_case is not None and model is not None:
            rendered = ", ".join(
                f"{k}={_render_value(model, k, v)}" for k, v in sorted(self.test_case.items()))
            out.append(f"  test case: {rendered}")
        for n in self.notes:
            out.append(f"  note: {n}")
        return "\n".join(out) + "\n"

    def serialize(self) -> str:
        lines = ["violet-report v1", f"mode {self.mode}", f"verdict {self.verdict}"]
        for ev in self.evidence:
            lines.append(f"evidence slow={ev.slow_id} fast={ev.fast_id} metric={ev.metric} "
                         f"slowval={ev.slow_value} fastval={ev.fast_value}")
            if ev.critical_chain:
                lines.append("chain " + "->".join(ev.critical_chain))
        if self.test_case is not None:
            lines.append("testcase " + ",".join(f"{k}={v}"
                                                for k, v in sorted(self.test_case.items())))
        for n in self.notes:
            lines.append(f"note {n}")
        return "\n".join(lines) + "\n"


def _render_value(model: ImpactModel, name: str, v: int) -> str:
    p = model.input_map.get(name) or model.config_map.get(name)
    return p.domain.render_value(v) if p is not None else str(v)


# ---------------------------------------------------------------------------
# Concrete configuration files
# ---------------------------------------------------------------------------

def parse_concrete_values(text: str, model: ImpactModel, file_name: str = "<config>",
                          kinds: tuple[str, ...] = ("config",)) -> dict[str, int]:
    """Parse a key = value settings file against the model's declarations.

    Out-of-domain or unknown-name settings are invalid (rejected here),
    which is a different failure class than specious.
    """
    domains = {p.name: p.domain for p in model.params if p.kind in kinds}
    try:
        return parse_settings(text, domains, file_name)
    except VioletError as e:
        raise CheckError(str(e)) from None


def full_config(model: ImpactModel, values: dict[str, int]) -> dict[str, int]:
    """Fill unset parameters with their declared defaults; validate domains."""
    out: dict[str, int] = {}
    for p in model.params:
        if p.kind != "config":
            continue
        if p.name in values:
            v = values[p.name]
            if v not in p.domain.values():
                raise CheckError(f"{p.name}={v} is outside {p.domain.render()}")
            out[p.name] = v
        else:
            out[p.name] = p.default if p.default is not None else next(iter(p.domain.values()))
    for name in values:
        if name not in out:
            raise CheckError(f"unknown parameter {name!r}")
    return out


# ---------------------------------------------------------------------------
# Row location and comparisons
# ---------------------------------------------------------------------------

def locate_rows(model: ImpactModel, config: dict[str, int]) -> list[CostTableRow]:
    """Rows whose configuration constraint the assignment satisfies;
    variables absent from a constraint are unconstrained."""
    return [r for r in model.rows if r.config_satisfied_by(config)]


def _regressions(slow_row: CostTableRow, fast_row: CostTableRow, threshold_pct: int):
    out = []
    for m in METRICS:
        sv, fv = slow_row.cost.get(m), fast_row.cost.get(m)
        if sv > fv and ratio_exceeds(sv, fv, threshold_pct):
            out.append((m, sv, fv))
    return out


def _best_evidence(model: ImpactModel, candidates) -> list[Evidence]:
    """Pick the strongest regression per (slow, fast) row pair."""
    evidence = []
    for slow_row, fast_row, regs in candidates:
        m, sv, fv = max(regs, key=lambda r: (float("inf") if r[2] == 0
                                             else (r[1] - r[2]) / r[2],
                                             -METRICS.index(r[0])))
        chain: list[str] = []
        d = model.diffs.get((slow_row.state_id, fast_row.state_id))
        if d is not None:
            chain = d.chain
        evidence.append(Evidence(slow_row.state_id, fast_row.state_id, m, sv, fv, chain))
    evidence.sort(key=lambda e: (e.slow_id, e.fast_id))
    return evidence


# ---------------------------------------------------------------------------
# Mode 1: config update
# ---------------------------------------------------------------------------

def check_update(model: ImpactModel, old: dict[str, int], new: dict[str, int],
                 threshold_pct: int | None = None) -> CheckReport:
    threshold = threshold_pct if threshold_pct is not None else model.threshold_pct
    old_rows = locate_rows(model, full_config(model, old))
    new_rows = locate_rows(model, full_config(model, new))
    if not old_rows or not new_rows:
        which = "old" if not old_rows else "new"
        return CheckReport(1, OUTSIDE,
                           notes=[f"{which} configuration matches no explored state"])
    # Hold the workload class fixed: compare rows with the same input
    # predicate, so the regression is attributable to the config change.
    pairs = [(nr, orow) for nr in new_rows for orow in old_rows
             if nr.predicate_text == orow.predicate_text]
    if not pairs:
        pairs = [(nr, orow) for nr in new_rows for orow in old_rows]
    candidates = []
    for nr, orow in pairs:
        regs = _regressions(nr, orow, threshold)
        if regs:
            candidates.append((nr, orow, regs))
    if not candidates:
        return CheckReport(1, OK)
    evidence = _best_evidence(model, candidates)
    slow_row = model.row_by_id(evidence[0].slow_id)
    test_case = None
    try:
        test_case = generate_test_case(slow_row.input_atoms, model)
    except CheckError:
        pass
    return CheckReport(1, SPECIOUS, evidence, test_case)


# ---------------------------------------------------------------------------
# Mode 2: poor default
# ---------------------------------------------------------------------------

def check_default(model: ImpactModel, overrides: dict[str, int] | None = None) -> CheckReport:
    for name in (overrides or {}):
        if name not in model.config_map:
            return CheckReport(2, OUTSIDE, notes=[f"parameter {name!r} is not in the model"])
    config = full_config(model, overrides or {})
    rows = locate_rows(model, config)
    if not rows:
        return CheckReport(2, OUTSIDE, notes=["defaults match no explored state"])
    row_ids = {r.state_id for r in rows}
    hits = [p for p in model.pairs if p.slow_id in row_ids]
    if not hits:
        return CheckReport(2, OK)
    evidence = []
    for p in hits:
        d = model.diffs.get((p.slow_id, p.fast_id))
        evidence.append(Evidence(p.slow_id, p.fast_id, p.metric, p.slow_value,
                                 p.fast_value, d.chain if d else []))
    slow_row = model.row_by_id(hits[0].slow_id)
    test_case = None
    try:
        test_case = generate_test_case(slow_row.input_atoms, model)
    except CheckError:
        pass
    return CheckReport(2, SPECIOUS, evidence, test_case)


# ---------------------------------------------------------------------------
# Mode 3: code upgrade or workload shift
# ---------------------------------------------------------------------------

def check_evolution(old_model: ImpactModel, new_model: ImpactModel,
                    old_workload: str | None = None, new_workload: str | None = None,
                    config: dict[str, int] | None = None,
                    threshold_pct: int | None = None) -> CheckReport:
    threshold = threshold_pct if threshold_pct is not None else new_model.threshold_pct
    if old_workload is not None or new_workload is not None:
        return _check_workload_shift(new_model, old_workload or "", new_workload or "",
                                     config, threshold)
    # Code-upgrade path: match groups across the two models by canonical
    # constraint text and compare their representative rows.
    old_groups = {g.constraint_text: g for g in old_model.groups}
    new_groups = {g.constraint_text: g for g in new_model.groups}
    notes = []
    only_old = sorted(set(old_groups) - set(new_groups))
    only_new = sorted(set(new_groups) - set(old_groups))
    if only_old:
        notes.append("constraints only in the old model: " + "; ".join(only_old))
    if only_new:
        notes.append("constraints only in the new model: " + "; ".join(only_new))
    candidates = []
    for text in new_groups:
        if text not in old_groups:
            continue
        new_rep = new_model.row_by_id(new_groups[text].rep_id)
        old_rep = old_model.row_by_id(old_groups[text].rep_id)
        regs = _regressions(new_rep, old_rep, threshold)
        if regs:
            candidates.append((new_rep, old_rep, regs))
    if not candidates:
        if not new_groups or not old_groups:
            return CheckReport(3, OUTSIDE, notes=notes or ["empty model"])
        return CheckReport(3, OK, notes=notes)
    evidence = _best_evidence(new_model, candidates)
    return CheckReport(3, SPECIOUS, evidence, None, notes)


def _check_workload_shift(model: ImpactModel, old_pred: str, new_pred: str,
                          config: dict[str, int] | None, threshold: int) -> CheckReport:
    old_atoms = parse_predicate(old_pred, model)
    new_atoms = parse_predicate(new_pred, model)
    rows = model.rows
    if config is not None:
        rows = locate_rows(model, full_config(model, config))
    old_rows = [r for r in rows if _predicate_overlaps(model, r, old_atoms)]
    new_rows = [r for r in rows if _predicate_overlaps(model, r, new_atoms)]
    if not old_rows or not new_rows:
        return CheckReport(3, OUTSIDE, notes=["workload predicate matches no explored state"])
    candidates = []
    for nr in new_rows:
        for orow in old_rows:
            regs = _regressions(nr, orow, threshold)
            if regs:
                candidates.append((nr, orow, regs))
    if not candidates:
        return CheckReport(3, OK)
    evidence = _best_evidence(model, candidates)
    slow_row = model.row_by_id(evidence[0].slow_id)
    test_case = None
    try:
        test_case = generate_test_case(slow_row.input_atoms, model)
    except CheckError:
        pass
    return CheckReport(3, SPECIOUS, evidence, test_case)


def parse_predicate(text: str, model: ImpactModel) -> list[CanonAtom]:
    """Parse a comma-separated list of input-predicate atoms."""
    atoms = []
    for part in text.split(","):
        part = part.strip()
        if part:
            atoms.append(parse_atom_text(part, model))
    return atoms


def _input_domains(model: ImpactModel) -> list[tuple[str, ast.Domain]]:
    return [(p.name, p.domain) for p in model.params if p.kind == "input"]


def _predicate_overlaps(model: ImpactModel, row: CostTableRow,
                        pred: list[CanonAtom]) -> bool:
    """Some input assignment satisfies both the row predicate and the query."""
    doms = _input_domains(model)
    names = [n for n, _ in doms]
    for combo in product(*(d.values() for _, d in doms)):
        env = dict(zip(names, combo))
        if all(a.holds(env) for a in row.input_atoms) and all(a.holds(env) for a in pred):
            return True
    return False


# ---------------------------------------------------------------------------
# Test-case generation
# ---------------------------------------------------------------------------

def generate_test_case(predicate: list[CanonAtom], model: ImpactModel) -> dict[str, int]:
    """Smallest input assignment (domain order, inputs in declaration
    order) satisfying the predicate; deterministic."""
    doms = _input_domains(model)
    names = [n for n, _ in doms]
    for a in predicate:
        for v in a.vars:
            if v not in names:
                raise CheckError(f"predicate references non-input variable {v!r}")
    for combo in product(*(d.values() for _, d in doms)):
        env = dict(zip(names, combo))
        if all(a.holds(env) for a in predicate):
            return env
    raise CheckError("unsatisfiable input predicate")
