"""Differential fuzzing: random programs, symbolic exploration vs the
brute-force oracle.

The generator only produces programs the whole pipeline supports
end-to-end (no externs, no concretize_all, definite assignment along
every executed path, returns only in tail position) with domains small
enough to enumerate.  Any divergence between the engine's constraint
classes and the oracle's path groups fails the test.
"""

from __future__ import annotations

import random

import pytest

from test_symexec import assert_oracle_equivalent
from violet.lang import parse_source

_METRICS = ("latency", "syscalls", "file_io_ops", "io_bytes", "sync_ops", "net_ops")


class _Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.int_vars = ["g0", "g1", "w0"]
        self.enum_var: str | None = None
        self.enum_members: list[str] = []
        self.helper_arity: list[int] = [
            1 if rng.random() < 0.6 else 0 for _ in range(rng.randrange(0, 3))
        ]

    # -- expressions --------------------------------------------------------

    def int_expr(self, defined: set[str], depth: int) -> str:
        r = self.rng
        leaves = [str(r.randrange(0, 5))] + self.int_vars + sorted(defined)
        if depth <= 0 or r.random() < 0.4:
            return r.choice(leaves)
        op = r.choice(("+", "-", "*", "+"))
        return f"{self.int_expr(defined, depth - 1)} {op} {self.int_expr(defined, depth - 1)}"

    def cond(self, defined: set[str]) -> str:
        r = self.rng
        if self.enum_var and r.random() < 0.3:
            return f"{self.enum_var} {r.choice(('==', '!='))} {r.choice(self.enum_members)}"
        op = r.choice(("==", "!=", "<", "<=", ">", ">="))
        left = self.int_expr(defined, 1)
        right = self.int_expr(defined, 1) if r.random() < 0.4 else str(r.randrange(0, 5))
        text = f"{left} {op} {right}"
        if r.random() < 0.25:
            text = f"{text} {r.choice(('&&', '||'))} {self.int_expr(defined, 0)} > {r.randrange(0, 3)}"
        return text

    # -- statements ---------------------------------------------------------

    def block(self, depth: int, defined: set[str], indent: int) -> list[str]:
        r = self.rng
        pad = "    " * indent
        out: list[str] = []
        n_local = 0
        for _ in range(r.randrange(1, 4 + depth)):
            roll = r.random()
            if roll < 0.30:
                out.append(f"{pad}cost {r.choice(_METRICS)} {r.randrange(1, 50)};")
            elif roll < 0.50:
                name = f"t{indent}_{n_local}"
                n_local += 1
                out.append(f"{pad}{name} := {self.int_expr(defined, 2)};")
                defined.add(name)
            elif roll < 0.78 and depth > 0:
                out.append(f"{pad}if ({self.cond(defined)}) {{")
                out.extend(self.block(depth - 1, set(defined), indent + 1))
                if r.random() < 0.6:
                    out.append(f"{pad}}} else {{")
                    out.extend(self.block(depth - 1, set(defined), indent + 1))
                out.append(f"{pad}}}")
            elif roll < 0.88 and depth > 0:
                name = f"t{indent}_{n_local}"
                n_local += 1
                out.append(f"{pad}{name} := 0;")
                defined.add(name)
                out.append(f"{pad}while ({name} < {self.int_expr(defined, 0)}) "
                           f"bound {r.randrange(1, 4)} {{")
                out.extend(self.block(0, set(defined), indent + 1))
                out.append(f"{pad}    {name} := {name} + 1;")
                out.append(f"{pad}}}")
            elif self.helper_arity:
                h = r.randrange(0, len(self.helper_arity))
                arg = self.int_expr(defined, 1) if self.helper_arity[h] else ""
                out.append(f"{pad}helper{h}({arg});")
            else:
                out.append(f"{pad}cost latency {r.randrange(1, 20)};")
        return out

    # -- whole program --------------------------------------------------------

    def program(self) -> str:
        r = self.rng
        decls = ["config g0: bool = false;"]
        hi = r.randrange(1, 4)
        decls.append(f"config g1: int in [0, {hi}] = {r.randrange(0, hi + 1)};")
        if r.random() < 0.7:
            self.enum_members = ["M_A", "M_B", "M_C"][: r.randrange(2, 4)]
            self.enum_var = "g2"
            decls.append(f"config g2: enum {{{', '.join(self.enum_members)}}} "
                         f"= {self.enum_members[0]};")
        decls.append(f"input w0: int in [0, {r.randrange(1, 3)}];")

        main = "fn main() {\n" + "\n".join(self.block(3, set(), 1)) + "\n}"
        helpers = []
        for h, arity in enumerate(self.helper_arity):
            params = f"p{h}: int in [0, 999]" if arity else ""
            defined = {f"p{h}"} if arity else set()
            body = self.block(2, defined, 1)
            if arity and r.random() < 0.4:
                body.append(f"    return p{h} + {r.randrange(0, 3)};")
            helpers.append(f"fn helper{h}({params}) {{\n" + "\n".join(body) + "\n}")
        return "\n".join(decls) + "\n\n" + main + "\n\n" + "\n\n".join(helpers) + "\n"


@pytest.mark.parametrize("seed", range(40))
def test_random_program_oracle_equivalence(seed):
    source = _Gen(random.Random(seed)).program()
    program = parse_source(source, f"fuzz_{seed}.cfs")
    assert_oracle_equivalent(program, f"fuzz seed {seed}")
