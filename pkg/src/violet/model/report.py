"""Human-readable renderings: the cost-table report and trace dumps."""

from __future__ import annotations

from ..engine.tracer import StateTrace
from .cost import METRICS
from .table import ImpactModel


def render_cost_table(model: ImpactModel) -> str:
    """The three-column table: one row per configuration-constraint group,
    showing the group's slowest state."""
    out = ["# configuration performance impact table"]
    out.append(f"# software: {model.software}")
    out.append(f"# target: {model.target if model.target else '-'}"
               f"  related: {','.join(model.related) if model.related else '-'}")
    out.append(f"# threshold: {model.threshold_pct}%  states: {len(model.rows)}"
               f"  constraint rows: {len(model.groups)}  suspicious pairs: {len(model.pairs)}")
    out.append("")
    header = ("Configuration Constraint", "Cost", "Workload Predicate")
    rows_r = []
    for g in model.groups:
        rep = model.row_by_id(g.rep_id)
        cost_bits = [f"{rep.cost.latency} units", g.render_highlight()]
        for m in METRICS[1:]:
            v = rep.cost.get(m)
            if v:
                cost_bits.append(f"{v} {m}")
        rows_r.append((g.constraint_text or "(always)",
                       ", ".join(cost_bits),
                       rep.predicate_text or "(any)"))
    widths = [max(len(header[i]), *(len(r[i]) for r in rows_r)) if rows_r else len(header[i])
              for i in range(3)]
    fmt = " | ".join("{:<%d}" % w for w in widths)
    out.append(fmt.format(*header))
    out.append("-+-".join("-" * w for w in widths))
    for r in rows_r:
        out.append(fmt.format(*r))
    if model.pairs:
        out.append("")
        out.append("# suspicious pairs (slow vs fast, ordered by similarity)")
        for p in model.pairs:
            line = (f"state {p.slow_id} vs state {p.fast_id}: {p.metric} "
                    f"{p.slow_value} vs {p.fast_value} (+{p.render_ratio()}), "
                    f"similarity {p.similarity}")
            d = model.diffs.get((p.slow_id, p.fast_id))
            if d is not None and d.chain:
                line += f", critical path {d.render_chain()}"
            out.append(line)
    return "\n".join(out) + "\n"


def render_trace_dump(trace: StateTrace) -> str:
    """Call tree with per-call latencies, indented by call depth."""
    out = [f"state {trace.state_id} ({trace.status}), total latency {trace.total_latency}, "
           f"constraint: {' && '.join(a.text for a in trace.atoms) or '(none)'}"]
    by_cid = {c.cid: c for c in trace.calls}
    children: dict[int | None, list[int]] = {}
    for c in trace.calls:
        children.setdefault(c.parent_id, []).append(c.cid)

    def emit(cid: int, depth: int) -> None:
        rec = by_cid[cid]
        lat = rec.latency if rec.latency is not None else "?"
        flag = "" if rec.matched else "  [unmatched]"
        out.append(f"{'  ' * depth}{rec.name}  cid={rec.cid}  latency={lat}"
                   f"  self={rec.self_latency}{flag}")
        for ch in sorted(children.get(cid, [])):
            emit(ch, depth + 1)

    for root in sorted(children.get(None, [])):
        emit(root, 0)
    if not trace.calls:
        out.append("(empty trace)")
    return "\n".join(out) + "\n"
