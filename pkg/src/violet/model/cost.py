"""Cost vectors: latency plus the logical metrics."""

from __future__ import annotations

from dataclasses import dataclass

METRICS = ("latency", "instructions", "syscalls", "file_io_ops",
           "io_bytes", "sync_ops", "net_ops")


@dataclass(frozen=True)
class CostVector:
    latency: int = 0
    instructions: int = 0
    syscalls: int = 0
    file_io_ops: int = 0
    io_bytes: int = 0
    sync_ops: int = 0
    net_ops: int = 0

    def __post_init__(self) -> None:
        for m in METRICS:
            if getattr(self, m) < 0:
                raise ValueError(f"negative {m} in cost vector")

    def __add__(self, other: "CostVector") -> "CostVector":
        return CostVector(**{m: getattr(self, m) + getattr(other, m) for m in METRICS})

    def get(self, metric: str) -> int:
        return getattr(self, metric)

    def as_dict(self) -> dict[str, int]:
        return {m: getattr(self, m) for m in METRICS}

    @classmethod
    def from_dict(cls, d: dict[str, int]) -> "CostVector":
        return cls(**{m: int(d.get(m, 0)) for m in METRICS})

    def render(self) -> str:
        return " ".join(f"{m}={getattr(self, m)}" for m in METRICS)
