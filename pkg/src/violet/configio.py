"""Concrete configuration files: ``name = value`` lines, # comments."""

from __future__ import annotations

from .diagnostics import VioletError
from .lang import ast


def parse_value(dom: ast.Domain, text: str) -> int | None:
    if isinstance(dom, ast.BoolDomain):
        if text in ("true", "on", "1"):
            return 1
        if text in ("false", "off", "0"):
            return 0
        return None
    if isinstance(dom, ast.IntDomain):
        try:
            return int(text)
        except ValueError:
            return None
    if isinstance(dom, ast.EnumDomain) and text in dom.members:
        return dom.members.index(text)
    return None


def parse_settings(text: str, domains: dict[str, ast.Domain],
                   file_name: str = "<config>") -> dict[str, int]:
    """Parse and domain-validate a settings file.

    Unknown names and out-of-domain values are invalid settings and are
    rejected here; speciousness is a separate judgement.
    """
    out: dict[str, int] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise VioletError(f"{file_name}:{ln}: expected name = value")
        name, _, value = (s.strip() for s in line.partition("="))
        if name not in domains:
            raise VioletError(f"{file_name}:{ln}: unknown parameter {name!r}")
        v = parse_value(domains[name], value)
        if v is None or v not in domains[name].values():
            raise VioletError(f"{file_name}:{ln}: {value!r} is not a valid value for "
                              f"{name} ({domains[name].render()})")
        out[name] = v
    return out


def render_settings(values: dict[str, int], domains: dict[str, ast.Domain]) -> str:
    lines = [f"{name} = {domains[name].render_value(v)}" for name, v in values.items()]
    return "\n".join(lines) + "\n"
