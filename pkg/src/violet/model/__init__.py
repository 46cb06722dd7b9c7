"""Impact model: cost table, suspicious pairs, diffs, serialization."""

from .cost import METRICS, CostVector
from .report import render_cost_table, render_trace_dump
from .serialize import MODEL_MAGIC, load_model, read_model, serialize_model, write_model
from .table import (
    ConstraintGroup,
    CostTableRow,
    DegenerateTrace,
    DiffCriticalPath,
    DiffRecord,
    ImpactModel,
    ParamDecl,
    SuspiciousPair,
    build_cost_table,
    build_model,
    differential_critical_path,
    extract_input_predicate,
    find_suspicious_pairs,
    group_rows,
    lcs_align,
    similarity,
    split_constraint,
)

__all__ = [
    "METRICS", "CostVector",
    "render_cost_table", "render_trace_dump",
    "MODEL_MAGIC", "serialize_model", "load_model", "write_model", "read_model",
    "ConstraintGroup", "CostTableRow", "DegenerateTrace", "DiffCriticalPath", "DiffRecord",
    "ImpactModel", "ParamDecl", "SuspiciousPair",
    "build_cost_table", "build_model", "differential_critical_path",
    "extract_input_predicate", "find_suspicious_pairs", "group_rows", "lcs_align",
    "similarity", "split_constraint",
]
