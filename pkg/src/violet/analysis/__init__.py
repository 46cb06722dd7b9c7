"""Static analysis: postdominance, control dependency, related parameters."""

from .callgraph import CallGraph, build_call_graph
from .postdom import control_dependent, control_dependent_nodes, postdominates, postdominator_sets
from .related import (
    ProgramAnalysis,
    RelatedSet,
    UsagePoint,
    analyze_program,
    get_enabler_configs,
    get_related_configs,
    parse_related_report,
    render_related_report,
)

__all__ = [
    "CallGraph", "build_call_graph",
    "postdominates", "postdominator_sets", "control_dependent", "control_dependent_nodes",
    "ProgramAnalysis", "RelatedSet", "UsagePoint", "analyze_program",
    "get_enabler_configs", "get_related_configs",
    "render_related_report", "parse_related_report",
]
