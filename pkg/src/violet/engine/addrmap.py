"""Synthetic address layout.

Functions are laid out sequentially above a nonzero load base, 4 address
units per statement plus one trailing pad slot, so a callsite's return
address (statement address + 4) always lands strictly inside the caller's
range and above its entry.  That makes the cid/return-address arithmetic
used for call-chain reconstruction hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..lang import ast

LOAD_BASE = 0x1000
STMT_SIZE = 4


@dataclass(frozen=True)
class FuncRange:
    name: str
    entry: int
    end: int  # exclusive


class AddressMap:
    def __init__(self, program: ast.Program):
        self.load_base = LOAD_BASE
        self.ranges: list[FuncRange] = []
        self.fn_entry: dict[str, int] = {}
        self.stmt_addr: dict[int, int] = {}
        self._by_entry: dict[int, str] = {}
        addr = LOAD_BASE
        for fn in program.functions:
            entry = addr
            off = 0
            for st in ast.walk_stmts(fn.body):
                self.stmt_addr[st.sid] = entry + off * STMT_SIZE
                off += 1
            end = entry + (off + 1) * STMT_SIZE
            self.ranges.append(FuncRange(fn.name, entry, end))
            self.fn_entry[fn.name] = entry
            self._by_entry[entry] = fn.name
            addr = end

    def entry_of(self, fn: str) -> int:
        return self.fn_entry[fn]

    def return_address(self, callsite_sid: int) -> int:
        return self.stmt_addr[callsite_sid] + STMT_SIZE

    def function_at(self, eip: int) -> str | None:
        return self._by_entry.get(eip)

    def offset(self, eip: int) -> int:
        return eip - self.load_base
