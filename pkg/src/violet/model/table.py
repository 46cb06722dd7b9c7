"""From state traces to the configuration performance impact model.

The cost table holds one row per explored state.  Rows sharing one
canonical configuration constraint form a group; the group's
representative is its slowest member, which is what the rendered
Table-style report shows.  Pair-wise comparison flags a pair as
suspicious when any cost component's difference ratio exceeds the
threshold; the differential critical path aligns two states' call
records by longest common subsequence and walks to the record with the
largest self-latency differential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..diagnostics import VioletError
from ..engine.constraints import CanonAtom
from ..engine.tracer import StateTrace
from ..lang import ast
from .cost import METRICS, CostVector


class DegenerateTrace(VioletError):
    """Differential critical path over a trace with no call records."""


# ---------------------------------------------------------------------------
# Cost table
# ---------------------------------------------------------------------------

@dataclass
class CostTableRow:
    state_id: int
    config_atoms: list[CanonAtom]
    input_atoms: list[CanonAtom]
    cost: CostVector
    status: str = "terminated"
    mixed_flagged: bool = False
    # handle into the originating trace list; in-memory only
    trace_index: int = field(default=-1, compare=False)

    @property
    def constraint_text(self) -> str:
        return " && ".join(a.text for a in self.config_atoms)

    @property
    def predicate_text(self) -> str:
        return " && ".join(a.text for a in self.input_atoms)

    def config_satisfied_by(self, assignment: dict[str, int]) -> bool:
        """True when no constraint atom rules the assignment out.

        Atoms over variables the assignment does not bind (the flagged
        mixed config/input atoms) cannot be decided here and keep the
        row as a candidate.
        """
        for a in self.config_atoms:
            if not set(a.vars) <= assignment.keys():
                continue
            if not a.holds(assignment):
                return False
        return True


def split_constraint(atoms: list[CanonAtom], program_like) -> tuple[list[CanonAtom], list[CanonAtom], bool]:
    """Partition canonical atoms into (config part, input part, mixed flag).

    Atoms over input variables only form the input predicate; everything
    else (pure config atoms, and flagged mixed/opaque atoms) stays in the
    configuration constraint.
    """
    config_atoms: list[CanonAtom] = []
    input_atoms: list[CanonAtom] = []
    mixed = False
    input_names = set(getattr(program_like, "input_map", {}))
    config_names = set(getattr(program_like, "config_map", {}))
    for a in atoms:
        vars_ = set(a.vars)
        if vars_ and vars_ <= input_names:
            input_atoms.append(a)
        else:
            if not vars_ <= config_names:
                mixed = True
            config_atoms.append(a)
    return config_atoms, input_atoms, mixed


def build_cost_table(traces: list[StateTrace], program_like) -> list[CostTableRow]:
    rows = []
    for idx, tr in enumerate(traces):
        config_atoms, input_atoms, mixed = split_constraint(tr.atoms, program_like)
        rows.append(CostTableRow(
            state_id=tr.state_id,
            config_atoms=config_atoms,
            input_atoms=input_atoms,
            cost=CostVector.from_dict(tr.cost),
            status=tr.status,
            mixed_flagged=mixed,
            trace_index=idx,
        ))
    return rows


# ---------------------------------------------------------------------------
# Similarity and suspicious pairs
# ---------------------------------------------------------------------------

def similarity(row_a: CostTableRow, row_b: CostTableRow, related: set[str]) -> int:
    """Count of shared configuration-constraint atoms over related parameters.

    Appearance-based: atom texts are compared after canonicalization, not
    checked for logical equivalence.
    """
    texts_a = {a.text for a in row_a.config_atoms if set(a.vars) & related}
    texts_b = {b.text for b in row_b.config_atoms if set(b.vars) & related}
    return len(texts_a & texts_b)


@dataclass(frozen=True)
class SuspiciousPair:
    slow_id: int
    fast_id: int
    metric: str
    slow_value: int
    fast_value: int
    similarity: int

    @property
    def ratio_percent(self) -> float:
        if self.fast_value == 0:
            return float("inf")
        return (self.slow_value - self.fast_value) * 100.0 / self.fast_value

    def render_ratio(self) -> str:
        if self.fast_value == 0:
            return "inf"
        return f"{self.ratio_percent:.1f}%"


def ratio_exceeds(slow: int, fast: int, threshold_pct: int) -> bool:
    """(slow − fast)/fast strictly exceeds the threshold; fast == 0 counts
    as exceeding whenever slow > 0 (the ratio is +inf)."""
    if slow <= fast:
        return False
    if fast == 0:
        return True  # ratio defined as +inf
    return (slow - fast) * 100 > threshold_pct * fast


def _pair_trigger(cost_a: CostVector, cost_b: CostVector, threshold_pct: int):
    """Best triggering metric for one row pair, or None.

    Returns (metric, slow_is_a, slow_value, fast_value) for the exceeding
    metric with the largest ratio; infinite ratios win, ties fall back to
    metric declaration order.
    """
    best = None
    best_rank: tuple = ()
    for order, m in enumerate(METRICS):
        va, vb = cost_a.get(m), cost_b.get(m)
        slow, fast, slow_is_a = (va, vb, True) if va > vb else (vb, va, False)
        if not ratio_exceeds(slow, fast, threshold_pct):
            continue
        ratio = float("inf") if fast == 0 else (slow - fast) / fast
        rank = (ratio, -order)
        if best is None or rank > best_rank:
            best = (m, slow_is_a, slow, fast)
            best_rank = rank
    return best


def find_suspicious_pairs(rows: list[CostTableRow], threshold_pct: int,
                          related: set[str]) -> list[SuspiciousPair]:
    if threshold_pct <= 0:
        raise VioletError("threshold must be positive")
    scored = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            a, b = rows[i], rows[j]
            sim = similarity(a, b, related)
            trig = _pair_trigger(a.cost, b.cost, threshold_pct)
            if trig is None:
                continue
            metric, slow_is_a, slow, fast = trig
            slow_row, fast_row = (a, b) if slow_is_a else (b, a)
            scored.append(SuspiciousPair(slow_row.state_id, fast_row.state_id,
                                         metric, slow, fast, sim))
    scored.sort(key=lambda p: (-p.similarity, min(p.slow_id, p.fast_id),
                               max(p.slow_id, p.fast_id)))
    return scored


# ---------------------------------------------------------------------------
# Differential critical path
# ---------------------------------------------------------------------------

@dataclass
class DiffRecord:
    cid: int  # cid in the slow trace (or fast-side cid for common records)
    name: str
    metrics: dict[str, int]  # deltas for common records, full self costs for slow-only


@dataclass
class DiffCriticalPath:
    common: list[DiffRecord]
    slow_only: list[DiffRecord]
    critical_cid: int | None
    chain: list[str]  # function names root -> critical record
    chain_suffix: list[str]  # the slow-only portion of the chain

    def render_chain(self) -> str:
        return "->".join(self.chain)


def lcs_align(keys_a: list, keys_b: list) -> list[tuple[int, int]]:
    """Longest common subsequence; returns aligned index pairs."""
    m, n = len(keys_a), len(keys_b)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        row = dp[i]
        nxt = dp[i + 1]
        for j in range(n - 1, -1, -1):
            if keys_a[i] == keys_b[j]:
                row[j] = nxt[j + 1] + 1
            else:
                row[j] = max(nxt[j], row[j + 1])
    out = []
    i = j = 0
    while i < m and j < n:
        if keys_a[i] == keys_b[j]:
            out.append((i, j))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            i += 1
        else:
            j += 1
    return out


def _self_metrics(rec) -> dict[str, int]:
    out = {"latency": rec.self_latency}
    for m in METRICS[1:]:
        out[m] = rec.self_metrics.get(m, 0)
    return out


def differential_critical_path(slow: StateTrace, fast: StateTrace) -> DiffCriticalPath:
    if not slow.calls or not fast.calls:
        raise DegenerateTrace("differential critical path needs at least one call record")
    sl = sorted(slow.calls, key=lambda c: c.cid)
    fa = sorted(fast.calls, key=lambda c: c.cid)
    pairs = lcs_align([c.key() for c in sl], [c.key() for c in fa])
    matched_slow = {i for i, _ in pairs}
    common: list[DiffRecord] = []
    for i, j in pairs:
        ms, mf = _self_metrics(sl[i]), _self_metrics(fa[j])
        common.append(DiffRecord(sl[i].cid, sl[i].name,
                                 {m: ms[m] - mf[m] for m in METRICS}))
    slow_only = [DiffRecord(sl[i].cid, sl[i].name, _self_metrics(sl[i]))
                 for i in range(len(sl)) if i not in matched_slow]

    candidates: list[tuple[int, int]] = []  # (differential latency, cid)
    roots = set(slow.roots)
    for rec_list in (common, slow_only):
        for rec in rec_list:
            if rec.cid in roots:
                continue  # the entry record is excluded
            candidates.append((rec.metrics["latency"], rec.cid))
    critical_cid: int | None = None
    best = None
    for dlat, cid in candidates:
        if dlat <= 0:
            continue
        if best is None or (dlat, -cid) > best:
            best = (dlat, -cid)
            critical_cid = cid
    chain: list[str] = []
    suffix: list[str] = []
    if critical_cid is not None:
        chain = slow.chain_names(critical_cid)
        slow_only_cids = {r.cid for r in slow_only}
        # walk the cid chain again to find where the traces diverge
        by_cid = {c.cid: c for c in slow.calls}
        cid_chain: list[int] = []
        cur: int | None = critical_cid
        while cur is not None:
            cid_chain.append(cur)
            cur = by_cid[cur].parent_id
        cid_chain.reverse()
        started = False
        for cid in cid_chain:
            if cid in slow_only_cids:
                started = True
            if started:
                suffix.append(by_cid[cid].name)
    return DiffCriticalPath(common, slow_only, critical_cid, chain, suffix)


# ---------------------------------------------------------------------------
# Input predicate extraction (exposed as its own operation)
# ---------------------------------------------------------------------------

def extract_input_predicate(atoms: list[CanonAtom], program_like):
    """(config part, input part); mixed atoms land in the config part."""
    config_atoms, input_atoms, _ = split_constraint(atoms, program_like)
    return config_atoms, input_atoms


# ---------------------------------------------------------------------------
# Groups and the model
# ---------------------------------------------------------------------------

@dataclass
class ConstraintGroup:
    constraint_text: str
    member_ids: list[int]
    rep_id: int
    highlight: list[str]  # distinctive call chain shown in the rendered table

    def render_highlight(self) -> str:
        return "{" + "->".join(self.highlight) + "}"


@dataclass
class ParamDecl:
    kind: str  # "config" | "input"
    name: str
    domain: ast.Domain
    default: int | None = None


@dataclass
class ImpactModel:
    software: str
    target: str | None
    related: list[str]
    threshold_pct: int
    params: list[ParamDecl]
    rows: list[CostTableRow]
    groups: list[ConstraintGroup]
    pairs: list[SuspiciousPair]
    diffs: dict[tuple[int, int], DiffCriticalPath] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.enum_members: dict[str, ast.EnumDomain] = {}
        for p in self.params:
            if isinstance(p.domain, ast.EnumDomain):
                for m in p.domain.members:
                    self.enum_members[m] = p.domain
        self.config_map = {p.name: p for p in self.params if p.kind == "config"}
        self.input_map = {p.name: p for p in self.params if p.kind == "input"}

    def row_by_id(self, state_id: int) -> CostTableRow:
        for r in self.rows:
            if r.state_id == state_id:
                return r
        raise VioletError(f"no cost-table row for state {state_id}")


def group_rows(rows: list[CostTableRow]) -> list[tuple[str, list[CostTableRow]]]:
    """Group rows by configuration constraint, in first-appearance order."""
    order: list[str] = []
    groups: dict[str, list[CostTableRow]] = {}
    for r in rows:
        key = r.constraint_text
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)
    return [(k, groups[k]) for k in order]


def _representative(members: list[CostTableRow]) -> CostTableRow:
    """Slowest member; ties go to the smallest state id."""
    return max(members, key=lambda r: (r.cost.latency, -r.state_id))


def build_model(traces: list[StateTrace], program_like, *, software: str,
                target: str | None, related: set[str], threshold_pct: int,
                params: list[ParamDecl]) -> ImpactModel:
    rows = build_cost_table(traces, program_like)
    sim_set = set(related) | ({target} if target else set())
    pairs = find_suspicious_pairs(rows, threshold_pct, sim_set)

    grouped = group_rows(rows)
    reps = {key: _representative(members) for key, members in grouped}
    baseline_key = None
    if grouped:
        baseline_key = min(grouped, key=lambda kv: (reps[kv[0]].cost.latency, kv[1][0].state_id))[0]
        slowest_key = max(grouped, key=lambda kv: (reps[kv[0]].cost.latency, -kv[1][0].state_id))[0]
    groups: list[ConstraintGroup] = []
    for key, members in grouped:
        rep = reps[key]
        other_key = baseline_key if key != baseline_key else slowest_key
        highlight: list[str] = []
        if other_key is not None and other_key != key:
            try:
                diff = differential_critical_path(traces[rep.trace_index],
                                                  traces[reps[other_key].trace_index])
                highlight = diff.chain_suffix
            except DegenerateTrace:
                highlight = []
        groups.append(ConstraintGroup(key, [m.state_id for m in members],
                                      rep.state_id, highlight))

    diffs: dict[tuple[int, int], DiffCriticalPath] = {}
    by_id = {r.state_id: r for r in rows}
    for p in pairs:
        key = (p.slow_id, p.fast_id)
        if key in diffs:
            continue
        try:
            diffs[key] = differential_critical_path(
                traces[by_id[p.slow_id].trace_index],
                traces[by_id[p.fast_id].trace_index])
        except DegenerateTrace:
            continue
    return ImpactModel(software, target, sorted(related), threshold_pct,
                       params, rows, groups, pairs, diffs)
