"""Command-line interface: related, analyze, check, trace-dump.

Exit codes: 0 success/ok, 1 usage or input errors, 2 specious verdict,
3 configuration outside the explored space, 4 malformed model file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .checker import (
    CheckReport,
    check_default,
    check_evolution,
    check_update,
)
from .configio import parse_settings
from .diagnostics import CheckError, ConfScriptError, ModelError, VioletError
from .engine import Budget, finalize_trace, read_trace
from .model import read_model, render_trace_dump
from .pipeline import run_analyze, run_related

ENV_SYM_CONFIGS = "VIO_SYM_CONFIGS"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="violet",
                                description="configuration performance impact analysis")
    p.add_argument("--version", action="version", version=f"violet {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    p_rel = sub.add_parser("related", help="compute related-parameter sets")
    p_rel.add_argument("program", help="ConfScript source (.cfs)")
    p_rel.add_argument("-o", "--output", help="write the report here instead of stdout")

    p_an = sub.add_parser("analyze", help="explore a program and build its impact model")
    p_an.add_argument("program", help="ConfScript source (.cfs)")
    p_an.add_argument("config", help="concrete configuration file")
    p_an.add_argument("--target", help="target parameter (symbolic set = target + related)")
    p_an.add_argument("--sym", help="comma-separated explicit symbolic config list")
    p_an.add_argument("--related-file", help="use this related-configs report "
                                             "instead of in-process analysis")
    p_an.add_argument("--threshold", type=int, default=100,
                      help="suspicious-pair threshold in percent (default 100)")
    p_an.add_argument("--out-dir", default="violet_run", help="run directory")
    p_an.add_argument("--max-states", type=int, default=4096)
    p_an.add_argument("--max-latency", type=int, default=10 ** 6,
                      help="virtual-clock budget per state")
    p_an.add_argument("--max-steps", type=int, default=10 ** 7)

    p_ch = sub.add_parser("check", help="check configuration files against a model")
    p_ch.add_argument("model", help="impact model file")
    p_ch.add_argument("--mode", type=int, choices=(1, 2, 3), required=True)
    p_ch.add_argument("--old", help="mode 1: old configuration file")
    p_ch.add_argument("--new", help="mode 1: new configuration file")
    p_ch.add_argument("--config", help="mode 2/3: settings file (mode 2 default: "
                                       "declared defaults)")
    p_ch.add_argument("--old-model", help="mode 3: baseline model file")
    p_ch.add_argument("--old-workload", help="mode 3: previous input predicate, "
                                             "comma-separated atoms")
    p_ch.add_argument("--new-workload", help="mode 3: current input predicate")
    p_ch.add_argument("--threshold", type=int, help="override the model threshold")
    p_ch.add_argument("--report", help="also write the serialized report here")

    p_td = sub.add_parser("trace-dump", help="render a trace file as a call tree")
    p_td.add_argument("trace", help="trace file")
    return p


def _settings(path: str, model, kinds=("config",)) -> dict[str, int]:
    domains = {}
    for prm in model.params:
        if prm.kind in kinds:
            domains[prm.name] = prm.domain
    return parse_settings(Path(path).read_text(encoding="utf-8"), domains, path)


def cmd_related(args) -> int:
    text = run_related(args.program)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    sym = [s.strip() for s in args.sym.split(",") if s.strip()] if args.sym else None
    env_value = None
    if args.target is None and sym is None and args.related_file is None:
        env_value = os.environ.get(ENV_SYM_CONFIGS)
    budget = Budget(args.max_states, args.max_latency, args.max_steps)
    if args.related_file and not args.target:
        raise VioletError("--related-file needs --target")
    model = run_analyze(args.program, args.config, args.out_dir,
                        target=args.target, sym=sym, env_value=env_value,
                        related_file=args.related_file,
                        threshold_pct=args.threshold, budget=budget)
    sys.stdout.write(f"{len(model.rows)} states, {len(model.groups)} constraint rows, "
                     f"{len(model.pairs)} suspicious pairs -> {args.out_dir}\n")
    return 0


def cmd_check(args) -> int:
    model = read_model(args.model)
    if args.mode == 1:
        if not args.old or not args.new:
            raise VioletError("mode 1 needs --old and --new configuration files")
        report = check_update(model, _settings(args.old, model),
                              _settings(args.new, model), args.threshold)
    elif args.mode == 2:
        overrides = _settings(args.config, model) if args.config else None
        report = check_default(model, overrides)
    else:
        if not args.old_model and not (args.old_workload or args.new_workload):
            raise VioletError("mode 3 needs --old-model or workload predicates")
        old_model = read_model(args.old_model) if args.old_model else model
        config = _settings(args.config, model) if args.config else None
        report = check_evolution(old_model, model,
                                 old_workload=args.old_workload,
                                 new_workload=args.new_workload,
                                 config=config, threshold_pct=args.threshold)
    sys.stdout.write(report.render(model))
    if args.report:
        Path(args.report).write_text(report.serialize(), encoding="utf-8")
    return report.exit_code


def cmd_trace_dump(args) -> int:
    trace = finalize_trace(read_trace(args.trace))
    sys.stdout.write(render_trace_dump(trace))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "related":
            return cmd_related(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "check":
            return cmd_check(args)
        if args.command == "trace-dump":
            return cmd_trace_dump(args)
        raise VioletError(f"unknown command {args.command!r}")
    except ConfScriptError as e:
        for d in e.diagnostics:
            print(d.render(), file=sys.stderr)
        return 1
    except ModelError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except (CheckError, VioletError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
