"""Symbolic execution engine: states, constraints, tracer, addressing."""

from .addrmap import AddressMap
from .constraints import (
    Atom,
    CanonAtom,
    PathConstraint,
    assignments,
    canonical_text,
    canonicalize,
    parse_atom_text,
    satisfiable,
    smallest_expr_value,
)
from .interp import Budget, Engine, ExecState, ExploreResult, tracer_start, tracer_stop
from .tracer import (
    CallRecord,
    KostRecord,
    RawTrace,
    ReturnRecord,
    StateTrace,
    attribute_costs,
    finalize_trace,
    match_call_returns,
    read_trace,
    reconstruct_call_chain,
    write_trace,
)

__all__ = [
    "AddressMap",
    "Atom", "CanonAtom", "PathConstraint", "assignments", "canonical_text",
    "canonicalize", "parse_atom_text", "satisfiable", "smallest_expr_value",
    "Budget", "Engine", "ExecState", "ExploreResult", "tracer_start", "tracer_stop",
    "CallRecord", "ReturnRecord", "KostRecord", "RawTrace", "StateTrace",
    "match_call_returns", "reconstruct_call_chain", "attribute_costs",
    "finalize_trace", "read_trace", "write_trace",
]
