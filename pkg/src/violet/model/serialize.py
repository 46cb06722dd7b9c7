"""Impact-model text serialization (``violet-model v1``).

Line-oriented, versioned, indentation-free; field ordering is fixed so
identical models serialize byte-identically.  The schema is documented
in docs/formats.md.
"""

from __future__ import annotations

from pathlib import Path

from ..diagnostics import ModelError
from ..engine.constraints import parse_atom_text
from ..lang import ast
from .cost import METRICS, CostVector
from .table import (
    ConstraintGroup,
    CostTableRow,
    DiffCriticalPath,
    DiffRecord,
    ImpactModel,
    ParamDecl,
    SuspiciousPair,
)

MODEL_MAGIC = "violet-model v1"


def _render_domain(dom: ast.Domain) -> str:
    if isinstance(dom, ast.BoolDomain):
        return "bool"
    if isinstance(dom, ast.IntDomain):
        return f"int {dom.lo} {dom.hi}"
    return "enum " + ",".join(dom.members)


def _parse_domain(text: str) -> ast.Domain:
    parts = text.split()
    if parts[0] == "bool":
        return ast.BoolDomain()
    if parts[0] == "int":
        return ast.IntDomain(int(parts[1]), int(parts[2]))
    if parts[0] == "enum":
        return ast.EnumDomain(tuple(parts[1].split(",")))
    raise ModelError(f"bad domain {text!r}")


def _metrics_text(d: dict[str, int]) -> str:
    return " ".join(f"{m}={d.get(m, 0)}" for m in METRICS)


def _parse_metrics(fields: list[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for f in fields:
        k, _, v = f.partition("=")
        out[k] = int(v)
    return out


def serialize_model(model: ImpactModel) -> str:
    lines = [MODEL_MAGIC]
    lines.append(f"software {model.software}")
    lines.append(f"target {model.target if model.target else '-'}")
    lines.append(f"threshold {model.threshold_pct}")
    lines.append("related " + (",".join(model.related) if model.related else "-"))
    for p in model.params:
        tail = ""
        if p.kind == "config":
            tail = f" default {p.domain.render_value(p.default)}"
        lines.append(f"param {p.kind} {p.name} {_render_domain(p.domain)}{tail}")
    for r in model.rows:
        lines.append(f"row {r.state_id} {r.status}{' flagged' if r.mixed_flagged else ''}")
        lines.append(f"cost {_metrics_text(r.cost.as_dict())}")
        for a in r.config_atoms:
            lines.append(f"constraint {a.text}")
        for a in r.input_atoms:
            lines.append(f"predicate {a.text}")
    for g in model.groups:
        lines.append(f"group {g.constraint_text if g.constraint_text else '-'}")
        lines.append("members " + ",".join(str(i) for i in g.member_ids))
        lines.append(f"rep {g.rep_id}")
        lines.append("highlight " + ("->".join(g.highlight) if g.highlight else "-"))
    for p in model.pairs:
        lines.append(f"pair slow={p.slow_id} fast={p.fast_id} metric={p.metric} "
                     f"slowval={p.slow_value} fastval={p.fast_value} similarity={p.similarity}")
    for (slow_id, fast_id), d in sorted(model.diffs.items()):
        lines.append(f"diff slow={slow_id} fast={fast_id}")
        for rec in d.common:
            lines.append(f"dcommon {rec.cid} {rec.name} {_metrics_text(rec.metrics)}")
        for rec in d.slow_only:
            lines.append(f"dslowonly {rec.cid} {rec.name} {_metrics_text(rec.metrics)}")
        lines.append(f"dcritical {d.critical_cid if d.critical_cid is not None else '-'}")
        lines.append("dchain " + ("->".join(d.chain) if d.chain else "-"))
        lines.append("dsuffix " + ("->".join(d.chain_suffix) if d.chain_suffix else "-"))
    return "\n".join(lines) + "\n"


def load_model(text: str) -> ImpactModel:
    lines = text.splitlines()
    if not lines or lines[0] != MODEL_MAGIC:
        raise ModelError("not a violet-model v1 file")
    software = ""
    target: str | None = None
    threshold = 100
    related: list[str] = []
    params: list[ParamDecl] = []
    rows: list[CostTableRow] = []
    groups: list[ConstraintGroup] = []
    pairs: list[SuspiciousPair] = []
    diffs: dict[tuple[int, int], DiffCriticalPath] = {}

    # two passes: params first so atom parsing knows the enum members
    for line in lines[1:]:
        if line.startswith("param "):
            parts = line.split()
            kind, name = parts[1], parts[2]
            if "default" in parts:
                di = parts.index("default")
                dom = _parse_domain(" ".join(parts[3:di]))
                raw = parts[di + 1]
                if isinstance(dom, ast.BoolDomain):
                    default = 1 if raw == "true" else 0
                elif isinstance(dom, ast.IntDomain):
                    default = int(raw)
                else:
                    default = dom.members.index(raw)
                params.append(ParamDecl(kind, name, dom, default))
            else:
                dom = _parse_domain(" ".join(parts[3:]))
                params.append(ParamDecl(kind, name, dom, None))

    shell = ImpactModel(software, target, related, threshold, params, [], [], [], {})

    cur_row: CostTableRow | None = None
    cur_group: ConstraintGroup | None = None
    cur_diff: DiffCriticalPath | None = None
    try:
        for ln, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            tag, _, rest = line.partition(" ")
            if tag == "software":
                software = rest
            elif tag == "target":
                target = None if rest == "-" else rest
            elif tag == "threshold":
                threshold = int(rest)
            elif tag == "related":
                related = [] if rest == "-" else rest.split(",")
            elif tag == "param":
                pass  # handled in the first pass
            elif tag == "row":
                parts = rest.split()
                cur_row = CostTableRow(int(parts[0]), [], [], CostVector(),
                                       status=parts[1],
                                       mixed_flagged="flagged" in parts[2:])
                rows.append(cur_row)
            elif tag == "cost":
                assert cur_row is not None
                cur_row.cost = CostVector.from_dict(_parse_metrics(rest.split()))
            elif tag == "constraint":
                assert cur_row is not None
                cur_row.config_atoms.append(parse_atom_text(rest, shell))
            elif tag == "predicate":
                assert cur_row is not None
                cur_row.input_atoms.append(parse_atom_text(rest, shell))
            elif tag == "group":
                cur_group = ConstraintGroup("" if rest == "-" else rest, [], -1, [])
                groups.append(cur_group)
            elif tag == "members":
                assert cur_group is not None
                cur_group.member_ids = [int(x) for x in rest.split(",") if x]
            elif tag == "rep":
                assert cur_group is not None
                cur_group.rep_id = int(rest)
            elif tag == "highlight":
                assert cur_group is not None
                cur_group.highlight = [] if rest == "-" else rest.split("->")
            elif tag == "pair":
                kv = dict(f.split("=", 1) for f in rest.split())
                pairs.append(SuspiciousPair(int(kv["slow"]), int(kv["fast"]), kv["metric"],
                                            int(kv["slowval"]), int(kv["fastval"]),
                                            int(kv["similarity"])))
            elif tag == "diff":
                kv = dict(f.split("=", 1) for f in rest.split())
                cur_diff = DiffCriticalPath([], [], None, [], [])
                diffs[(int(kv["slow"]), int(kv["fast"]))] = cur_diff
            elif tag == "dcommon":
                assert cur_diff is not None
                parts = rest.split()
                cur_diff.common.append(DiffRecord(int(parts[0]), parts[1],
                                                  _parse_metrics(parts[2:])))
            elif tag == "dslowonly":
                assert cur_diff is not None
                parts = rest.split()
                cur_diff.slow_only.append(DiffRecord(int(parts[0]), parts[1],
                                                     _parse_metrics(parts[2:])))
            elif tag == "dcritical":
                assert cur_diff is not None
                cur_diff.critical_cid = None if rest == "-" else int(rest)
            elif tag == "dchain":
                assert cur_diff is not None
                cur_diff.chain = [] if rest == "-" else rest.split("->")
            elif tag == "dsuffix":
                assert cur_diff is not None
                cur_diff.chain_suffix = [] if rest == "-" else rest.split("->")
            else:
                raise ModelError(f"unknown model line tag {tag!r}")
    except (ValueError, AssertionError, KeyError, IndexError) as e:
        raise ModelError(f"malformed model file at line {ln}: {line!r} ({e})") from None
    return ImpactModel(software, target, related, threshold, params, rows,
                       groups, pairs, diffs)


def write_model(path: str | Path, model: ImpactModel) -> None:
    Path(path).write_text(serialize_model(model), encoding="utf-8")


def read_model(path: str | Path) -> ImpactModel:
    return load_model(Path(path).read_text(encoding="utf-8"))
