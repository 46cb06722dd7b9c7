"""Checker: validate concrete configuration files against impact models."""

from .checker import (
    EXIT_CODES,
    OK,
    OUTSIDE,
    SPECIOUS,
    CheckReport,
    Evidence,
    check_default,
    check_evolution,
    check_update,
    full_config,
    generate_test_case,
    locate_rows,
    parse_concrete_values,
    parse_predicate,
)

__all__ = [
    "EXIT_CODES", "OK", "OUTSIDE", "SPECIOUS",
    "CheckReport", "Evidence",
    "check_update", "check_default", "check_evolution",
    "locate_rows", "generate_test_case", "full_config",
    "parse_concrete_values", "parse_predicate",
]
