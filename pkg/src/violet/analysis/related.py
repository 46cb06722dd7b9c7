"""Related-parameter computation.

For a target parameter p, the enabler parameters are those whose
branches decide whether p's code is reached; the influenced parameters
are the inverse relation.  Enablers follow the two-step walk: locate
every usage of p, enumerate the call chains from the entry to the using
function, and test whether the callsite leading toward p (or p's usage
statement when in the same function) is control dependent on another
parameter's usage.

Usage detection includes a one-hop data-flow extension: a local assigned
directly from a config (or from a pure extern applied to one config)
carries that config's identity, so branches on the local count as
branches on the config.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import AnalysisError
from ..lang import ast
from ..lang.cfg import CFG, lower_program
from .callgraph import CallGraph, build_call_graph
from .postdom import control_dependent


@dataclass(frozen=True)
class UsagePoint:
    param: str
    func: str
    instruction: int  # statement sid


@dataclass
class RelatedSet:
    target: str
    enablers: set[str]
    influenced: set[str]

    @property
    def related(self) -> set[str]:
        return self.enablers | self.influenced


@dataclass
class ProgramAnalysis:
    """Shared static context: CFGs, call graph, usage tables."""

    program: ast.Program
    cfgs: dict[str, CFG]
    callgraph: CallGraph
    aliases: dict[str, dict[str, str]]  # func -> local -> config
    usages: dict[str, list[UsagePoint]]  # config -> usage points
    branch_usages: dict[str, list[tuple[str, int]]]  # func -> [(config, cond sid)]


def _collect_aliases(program: ast.Program) -> dict[str, dict[str, str]]:
    """One-hop locals: ``x := cfg;`` or ``x := pure_getter(cfg);``."""
    out: dict[str, dict[str, str]] = {}
    for fn in program.functions:
        candidates: dict[str, str] = {}
        assign_counts: dict[str, int] = {}
        for st in ast.walk_stmts(fn.body):
            if not isinstance(st, ast.Assign):
                continue
            assign_counts[st.target] = assign_counts.get(st.target, 0) + 1
            src = None
            if isinstance(st.value, ast.Var) and program.var_kind(st.value.name) == "config":
                src = st.value.name
            elif isinstance(st.value, ast.CallExpr):
                callee = program.fn_map.get(st.value.name)
                if (callee is not None and "pure" in callee.attrs
                        and len(st.value.args) == 1
                        and isinstance(st.value.args[0], ast.Var)
                        and program.var_kind(st.value.args[0].name) == "config"):
                    src = st.value.args[0].name
            if src is not None:
                candidates[st.target] = src
        out[fn.name] = {local: cfg for local, cfg in candidates.items()
                        if assign_counts.get(local, 0) == 1}
    return out


def _stmt_configs(program: ast.Program, fn: str, st: ast.Stmt,
                  aliases: dict[str, dict[str, str]]) -> set[str]:
    """Configs referenced by one statement, through aliases too."""
    names: set[str] = set()
    for e in ast.stmt_exprs(st):
        names |= ast.expr_vars(e)
    if isinstance(st, ast.Assign) and isinstance(st.value, ast.CallExpr):
        for a in st.value.args:
            names |= ast.expr_vars(a)
    configs: set[str] = set()
    fn_aliases = aliases.get(fn, {})
    for n in names:
        if program.var_kind(n) == "config":
            configs.add(n)
        elif n in fn_aliases:
            configs.add(fn_aliases[n])
    return configs


def analyze_program(program: ast.Program) -> ProgramAnalysis:
    cfgs = lower_program(program)
    cg = build_call_graph(program)
    aliases = _collect_aliases(program)
    usages: dict[str, list[UsagePoint]] = {c.name: [] for c in program.configs}
    branch_usages: dict[str, list[tuple[str, int]]] = {f.name: [] for f in program.functions}
    for fn in program.functions:
        for st in ast.walk_stmts(fn.body):
            for cfg_name in sorted(_stmt_configs(program, fn.name, st, aliases)):
                usages[cfg_name].append(UsagePoint(cfg_name, fn.name, st.sid))
                if isinstance(st, (ast.If, ast.While)):
                    branch_usages[fn.name].append((cfg_name, st.sid))
    return ProgramAnalysis(program, cfgs, cg, aliases, usages, branch_usages)


def get_enabler_configs(program_or_ctx, p: str) -> set[str]:
    """Enabler parameters of target config p."""
    ctx = (program_or_ctx if isinstance(program_or_ctx, ProgramAnalysis)
           else analyze_program(program_or_ctx))
    program = ctx.program
    if p not in program.config_map:
        raise AnalysisError(f"unknown config {p!r}")
    enablers: set[str] = set()
    for p_usage in ctx.usages[p]:
        chains = ctx.callgraph.paths(program.entry, p_usage.func)
        for chain in chains:
            # For each caller on the chain, the callsite that leads toward
            # p's function is the chain edge out of that caller.
            for q_func, callsite_sid in chain:
                cfg = ctx.cfgs.get(q_func)
                if cfg is None:
                    continue
                for q_name, q_sid in ctx.branch_usages[q_func]:
                    if q_name == p or q_sid == p_usage.instruction:
                        continue
                    if control_dependent(cfg, callsite_sid, q_sid):
                        enablers.add(q_name)
        # Within p's own function: test p's usage statement directly.
        cfg = ctx.cfgs.get(p_usage.func)
        if cfg is None:
            continue
        for q_name, q_sid in ctx.branch_usages[p_usage.func]:
            if q_name == p or q_sid == p_usage.instruction:
                continue
            if control_dependent(cfg, p_usage.instruction, q_sid):
                enablers.add(q_name)
    return enablers


def get_related_configs(program: ast.Program) -> dict[str, RelatedSet]:
    """Enabler sets for every parameter, influenced sets as the inverse,
    and the related set as their union."""
    ctx = analyze_program(program)
    enablers_map: dict[str, set[str]] = {}
    influenced_map: dict[str, set[str]] = {c.name: set() for c in program.configs}
    for c in program.configs:
        es = get_enabler_configs(ctx, c.name)
        enablers_map[c.name] = es
        for q in es:
            influenced_map[q].add(c.name)
    return {
        c.name: RelatedSet(c.name, enablers_map[c.name], influenced_map[c.name])
        for c in program.configs
    }


# ---------------------------------------------------------------------------
# Report format: one line per parameter, consumed by the symbolic engine
# as its symbolic-set file.
# ---------------------------------------------------------------------------

def render_related_report(related: dict[str, RelatedSet], program: ast.Program) -> str:
    lines = []
    for c in program.configs:
        rs = related[c.name]
        lines.append("{}\tenabler:{}\tinfluenced:{}".format(
            c.name, ",".join(sorted(rs.enablers)), ",".join(sorted(rs.influenced))))
    return "\n".join(lines) + "\n"


def parse_related_report(text: str) -> dict[str, RelatedSet]:
    out: dict[str, RelatedSet] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not parts[1].startswith("enabler:") \
                or not parts[2].startswith("influenced:"):
            raise AnalysisError(f"malformed related-configs line: {line!r}")
        target = parts[0]
        enablers = {s for s in parts[1][len("enabler:"):].split(",") if s}
        influenced = {s for s in parts[2][len("influenced:"):].split(",") if s}
        out[target] = RelatedSet(target, enablers, influenced)
    return out
