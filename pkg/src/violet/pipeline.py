"""End-to-end analysis runs.

One run = parse the program, pick the symbolic set, explore, write the
per-state trace files, then build the impact model *from those files*
(the trace format is the real interchange between engine and analyzer).
All outputs land under one run directory and are byte-stable across
repeated runs with the same inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .analysis import get_related_configs, parse_related_report, render_related_report
from .configio import parse_settings
from .diagnostics import VioletError
from .engine import Budget, Engine, finalize_trace, read_trace, write_trace
from .lang import ast, parse_file
from .model import ImpactModel, ParamDecl, build_model, render_cost_table, write_model

MODEL_FILE = "model.vm"
TABLE_FILE = "cost_table.txt"
RELATED_FILE = "related.tsv"
MANIFEST_FILE = "manifest.json"
TRACE_DIR = "traces"


@dataclass
class RunManifest:
    program: str
    config: str
    symbolic_source: str  # "target" | "list" | "env"
    target: str | None
    symbolic_set: list[str]
    threshold_pct: int
    budget: Budget
    out_dir: str

    def to_json(self) -> str:
        d = {
            "tool": "violet",
            "version": __version__,
            "program": self.program,
            "config": self.config,
            "symbolic_source": self.symbolic_source,
            "target": self.target,
            "symbolic_set": self.symbolic_set,
            "threshold_pct": self.threshold_pct,
            "budget": {
                "max_states": self.budget.max_states,
                "max_latency_per_state": self.budget.max_latency_per_state,
                "max_steps": self.budget.max_steps,
            },
        }
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def param_decls(program: ast.Program) -> list[ParamDecl]:
    decls = [ParamDecl("config", c.name, c.domain, c.default) for c in program.configs]
    decls += [ParamDecl("input", i.name, i.domain, None) for i in program.inputs]
    return decls


def choose_symbolic_set(program: ast.Program, *, target: str | None,
                        sym: list[str] | None, env_value: str | None,
                        related_file_text: str | None) -> tuple[str, set[str]]:
    """Resolve the one active symbolic-set source.

    With a target: target ∪ related(target) ∪ all inputs.  With an
    explicit list (flag or environment): the listed configs ∪ all inputs.
    """
    if target is not None and sym is not None:
        raise VioletError("--target and --sym are mutually exclusive")
    inputs = {i.name for i in program.inputs}
    if target is not None:
        if target not in program.config_map:
            raise VioletError(f"unknown target parameter {target!r}")
        if related_file_text is not None:
            related = parse_related_report(related_file_text)
            rel = related.get(target)
            rel_names = rel.related if rel is not None else set()
        else:
            rel_names = get_related_configs(program)[target].related
        return "target", {target} | set(rel_names) | inputs
    if sym is not None:
        return "list", set(sym) | inputs
    if env_value:
        names = {s.strip() for s in env_value.split(",") if s.strip()}
        return "env", names | inputs
    # nothing requested: fully concrete run, inputs still symbolic
    return "list", inputs


def run_analyze(program_path: str | Path, config_path: str | Path, out_dir: str | Path, *,
                target: str | None = None, sym: list[str] | None = None,
                env_value: str | None = None, related_file: str | Path | None = None,
                threshold_pct: int = 100, budget: Budget | None = None) -> ImpactModel:
    budget = budget or Budget()
    program = parse_file(program_path)
    config_text = Path(config_path).read_text(encoding="utf-8")
    config_values = parse_settings(config_text, {c.name: c.domain for c in program.configs},
                                   str(config_path))
    for c in program.configs:
        if c.name not in config_values:
            config_values[c.name] = c.default

    related_text = Path(related_file).read_text(encoding="utf-8") if related_file else None
    source, symbolic_set = choose_symbolic_set(
        program, target=target, sym=sym, env_value=env_value,
        related_file_text=related_text)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / TRACE_DIR).mkdir(exist_ok=True)

    related_map = get_related_configs(program)
    (out / RELATED_FILE).write_text(render_related_report(related_map, program),
                                    encoding="utf-8")

    engine = Engine(program)
    result = engine.explore(config_values, symbolic_set, budget)
    trace_paths = []
    for state in result.states:
        raw = engine.raw_trace(state)
        path = out / TRACE_DIR / f"state_{state.sid:04d}.trace"
        write_trace(path, raw)
        trace_paths.append(path)

    # Analyzer side: read the traces back from disk.
    traces = [finalize_trace(read_trace(p), program) for p in trace_paths]
    related_names = set(related_map[target].related) if target else set(symbolic_set) - {
        i.name for i in program.inputs}
    model = build_model(traces, program,
                        software=Path(program_path).name,
                        target=target,
                        related=related_names,
                        threshold_pct=threshold_pct,
                        params=param_decls(program))
    write_model(out / MODEL_FILE, model)
    (out / TABLE_FILE).write_text(render_cost_table(model), encoding="utf-8")
    manifest = RunManifest(str(program_path), str(config_path), source, target,
                           sorted(symbolic_set), threshold_pct, budget, str(out_dir))
    (out / MANIFEST_FILE).write_text(manifest.to_json(), encoding="utf-8")
    return model


def run_related(program_path: str | Path) -> str:
    program = parse_file(program_path)
    return render_related_report(get_related_configs(program), program)
