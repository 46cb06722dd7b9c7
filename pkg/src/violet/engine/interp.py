"""Finite-domain symbolic execution of ConfScript programs.

Exploration is depth-first and deterministic: at a branch on a symbolic
condition both arms are checked for feasibility by enumeration; when both
are feasible the current state continues into the true arm and a forked
state (next state id) takes the false arm.  Branch atoms are appended
only on real forks, so every state's constraint set exactly partitions
the in-domain assignment space.

Extern calls concretize symbolic arguments to their smallest satisfying
witness.  `pure` externs then drop the witness atoms and return a fresh
symbolic value over their declared return domain; `benign` externs drop
the atoms; plain externs keep them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..diagnostics import EngineError
from ..lang import ast
from .addrmap import AddressMap
from .constraints import (
    Atom,
    DomainMap,
    PathConstraint,
    canonical_text,
    canonicalize,
    satisfiable,
    smallest_expr_value,
)
from .tracer import CallRecord, KostRecord, RawTrace, ReturnRecord
from .values import Value, as_expr, concrete_of, eval_value


@dataclass
class Budget:
    max_states: int = 4096
    max_latency_per_state: int = 10 ** 6
    max_steps: int = 10 ** 7


@dataclass
class _Frame:
    fn: ast.FunctionDef
    env: dict[str, Value]
    # stack of (statement list, index) cursors; innermost block last
    blocks: list[list]
    ret_target: str | None  # local in the caller to receive the return value
    return_address: int | None
    fid: int = 0  # stable frame identity; taint locations key on it

    def clone(self) -> "_Frame":
        return _Frame(self.fn, dict(self.env), [[body, idx] for body, idx in self.blocks],
                      self.ret_target, self.return_address, self.fid)


@dataclass
class ExecState:
    sid: int
    frames: list[_Frame]
    constraint: PathConstraint
    clock: int = 0
    status: str = "running"  # running | terminated | budget-exceeded
    trace_enabled: bool = True
    next_cid: int = 1
    next_seq: int = 0
    next_fresh: int = 1
    calls: list[CallRecord] = field(default_factory=list)
    returns: list[ReturnRecord] = field(default_factory=list)
    costs: list[KostRecord] = field(default_factory=list)
    cost_totals: dict[str, int] = field(default_factory=dict)
    active_cids: list[int | None] = field(default_factory=list)  # dynamic stack, per frame
    taint: dict[ast.Expr, set[tuple[int, str]]] = field(default_factory=dict)
    domains: DomainMap = field(default_factory=dict)
    returned_value: Value | None = None
    next_fid: int = 1

    def clone(self, new_sid: int) -> "ExecState":
        st = ExecState(
            sid=new_sid,
            frames=[f.clone() for f in self.frames],
            constraint=self.constraint.copy(),
            clock=self.clock,
            status=self.status,
            trace_enabled=self.trace_enabled,
            next_cid=self.next_cid,
            next_seq=self.next_seq,
            next_fresh=self.next_fresh,
            calls=[CallRecord(c.cid, c.eip, c.return_address, c.timestamp, c.thread_id,
                              seq=c.seq, truth_parent=c.truth_parent) for c in self.calls],
            returns=[ReturnRecord(r.return_address, r.timestamp, r.thread_id, seq=r.seq)
                     for r in self.returns],
            costs=[KostRecord(k.metric, k.amount, k.timestamp, seq=k.seq) for k in self.costs],
            cost_totals=dict(self.cost_totals),
            active_cids=list(self.active_cids),
            taint={k: set(v) for k, v in self.taint.items()},
            domains=dict(self.domains),
            next_fid=self.next_fid,
        )
        return st


@dataclass
class ExploreResult:
    states: list[ExecState]
    budget_exhausted: bool
    steps: int

    def raw_traces(self, engine: "Engine") -> list[RawTrace]:
        return [engine.raw_trace(s) for s in self.states]


class Engine:
    def __init__(self, program: ast.Program):
        self.program = program
        self.addrmap = AddressMap(program)

    # -- state setup ----------------------------------------------------------

    def make_symbolic(self, state: ExecState, targets: set[str],
                      concrete: dict[str, int]) -> None:
        """Give targeted variables fresh symbolic values with domain-range
        seed atoms; everything else takes its concrete value."""
        env = state.frames[0].env
        for name in sorted(targets):
            dom = self.program.domain_of(name)
            if dom is None:
                raise EngineError(f"unknown config/input {name!r} in symbolic set")
            env[name] = ast.Var(name)
            state.domains[name] = dom
            state.constraint.append(self._domain_seed_atom(name, dom))
        for name, value in concrete.items():
            if name in targets:
                continue
            env[name] = value

    def _domain_seed_atom(self, name: str, dom: ast.Domain) -> Atom:
        """One range atom per variable: lo ≤ v && v ≤ hi."""
        v = ast.Var(name)
        if isinstance(dom, ast.IntDomain):
            lo, hi = dom.lo, dom.hi
        else:
            lo, hi = 0, dom.size() - 1
        rng = ast.Binary("&&",
                         ast.Binary(">=", v, ast.IntLit(lo)),
                         ast.Binary("<=", v, ast.IntLit(hi)))
        return Atom(rng, True, seed=True)

    # -- exploration ------------------------------------------------------------

    def explore(self, config_values: dict[str, int], symbolic_set: set[str],
                budget: Budget | None = None, input_values: dict[str, int] | None = None,
                trace_on_at_start: bool = True) -> ExploreResult:
        budget = budget or Budget()
        self._validate_config(config_values, symbolic_set, input_values or {})

        entry = self.program.fn_map[self.program.entry]
        root = ExecState(sid=0, frames=[_Frame(entry, {}, [[entry.body, 0]], None, None, fid=0)],
                         constraint=PathConstraint(), trace_enabled=trace_on_at_start)
        concrete = dict(config_values)
        concrete.update(input_values or {})
        self.make_symbolic(root, set(symbolic_set), concrete)
        self._emit_call(root, entry.name, return_address=0)

        worklist = [root]
        terminals: list[ExecState] = []
        next_sid = 1
        steps = 0
        exhausted = False
        while worklist:
            state = worklist.pop()
            while state.status == "running":
                if steps >= budget.max_steps:
                    exhausted = True
                    self._finish(state, "budget-exceeded")
                    break
                steps += 1
                fork = self._step(state)
                if fork is not None:
                    if next_sid >= budget.max_states:
                        # state cap: the unexplored arm is dropped and the
                        # result is flagged as partial
                        exhausted = True
                    else:
                        fork.sid = next_sid
                        next_sid += 1
                        worklist.append(fork)
                if state.clock > budget.max_latency_per_state and state.status == "running":
                    self._finish(state, "budget-exceeded")
            terminals.append(state)
            if exhausted and steps >= budget.max_steps:
                for leftover in reversed(worklist):
                    self._finish(leftover, "budget-exceeded")
                    terminals.append(leftover)
                worklist.clear()
        return ExploreResult(terminals, exhausted, steps)

    def _validate_config(self, config_values: dict[str, int], symbolic_set: set[str],
                         input_values: dict[str, int]) -> None:
        for name in symbolic_set:
            if self.program.domain_of(name) is None:
                raise EngineError(f"unknown name {name!r} in symbolic set")
        for c in self.program.configs:
            if c.name in symbolic_set:
                continue
            if c.name not in config_values:
                raise EngineError(f"config file misses a value for {c.name!r}")
            v = config_values[c.name]
            if v not in c.domain.values():
                raise EngineError(
                    f"config {c.name!r}={c.domain.render_value(v) if 0 <= v < c.domain.size() else v} "
                    f"violates its domain {c.domain.render()}")
        for i in self.program.inputs:
            if i.name not in symbolic_set and i.name not in input_values \
                    and i.name not in config_values:
                raise EngineError(f"input {i.name!r} is neither symbolic nor assigned")
        for name, v in config_values.items():
            dom = self.program.domain_of(name)
            if dom is None:
                raise EngineError(f"config file assigns undeclared name {name!r}")
            if v not in dom.values():
                raise EngineError(f"{name!r}={v} violates its domain {dom.render()}")

    # -- single step --------------------------------------------------------

    def _step(self, state: ExecState) -> ExecState | None:
        """Execute one statement; returns a forked state or None."""
        frame = state.frames[-1]
        while frame.blocks and frame.blocks[-1][1] >= len(frame.blocks[-1][0]):
            frame.blocks.pop()
        if not frame.blocks:
            self._return_from_frame(state, None)
            return None
        body, idx = frame.blocks[-1]
        st = body[idx]
        frame.blocks[-1][1] = idx + 1
        self._count_instruction(state)

        if isinstance(st, _LoopRecheck):
            return self._enter_loop(state, st.st, first=False, remaining=st.remaining)
        if isinstance(st, ast.Cost):
            self._apply_cost(state, st.metric, st.amount)
            return None
        if isinstance(st, ast.TraceOn):
            state.trace_enabled = True
            return None
        if isinstance(st, ast.TraceOff):
            state.trace_enabled = False
            return None
        if isinstance(st, ast.Assign):
            if isinstance(st.value, ast.CallExpr):
                self._call(state, st.value.name, st.value.args, ret_target=st.target,
                           callsite=st.sid)
            else:
                v = eval_value(st.value, lambda n: self._lookup(state, n))
                self._write_local(state, st.target, v)
            return None
        if isinstance(st, ast.CallStmt):
            self._call(state, st.name, st.args, ret_target=None, callsite=st.sid)
            return None
        if isinstance(st, ast.Return):
            v = None
            if st.value is not None:
                v = eval_value(st.value, lambda n: self._lookup(state, n))
            self._return_from_frame(state, v)
            return None
        if isinstance(st, ast.ConcretizeAll):
            self.concretize_all(state, as_expr(self._lookup(state, st.var)))
            return None
        if isinstance(st, ast.If):
            taken, fork = self._branch(state, st.cond)
            target = st.then_body if taken else st.else_body
            frame.blocks.append([target, 0])
            if fork is not None:
                ffr = fork.frames[-1]
                ffr.blocks.append([st.else_body, 0])
            return fork
        if isinstance(st, ast.While):
            return self._enter_loop(state, st, first=True)
        raise EngineError(f"unhandled statement {st!r}")

    def _enter_loop(self, state: ExecState, st: ast.While, first: bool,
                    remaining: int | None = None) -> ExecState | None:
        remaining = st.bound if first else remaining
        if remaining == 0:
            return None  # bound exhausted: fall out without testing the condition
        taken, fork = self._branch(state, st.cond)
        if taken:
            frame = state.frames[-1]
            # loop body followed by a re-check marker
            frame.blocks.append([[_LoopRecheck(st, remaining - 1)], 0])
            frame.blocks.append([st.body, 0])
        return fork

    def _branch(self, state: ExecState, cond: ast.Expr) -> tuple[bool, ExecState | None]:
        """Decide a condition; may fork.  Returns (taken, forked_state)."""
        v = eval_value(cond, lambda n: self._lookup(state, n))
        cv = concrete_of(v)
        if cv is not None:
            return cv != 0, None
        expr = as_expr(v)
        atom_true = Atom(expr, True)
        atom_false = Atom(expr, False)
        feas_true = satisfiable(state.constraint + [atom_true], state.domains)
        feas_false = satisfiable(state.constraint + [atom_false], state.domains)
        if feas_true and feas_false:
            fork = state.clone(new_sid=-1)
            fork.constraint.append(atom_false)
            state.constraint.append(atom_true)
            return True, fork
        if feas_true:
            return True, None
        if feas_false:
            return False, None
        raise EngineError("state constraint became unsatisfiable at a branch")

    # -- calls ---------------------------------------------------------------

    def _call(self, state: ExecState, name: str, args: tuple[ast.Expr, ...],
              ret_target: str | None, callsite: int) -> None:
        callee = self.program.fn_map.get(name)
        if callee is None:
            raise EngineError(f"call to unknown function {name!r}")
        arg_values = [eval_value(a, lambda n: self._lookup(state, n)) for a in args]
        ra = self.addrmap.return_address(callsite)
        if callee.is_extern:
            self._emit_call(state, name, ra)
            ret = self.concretize_at_extern(state, callee, arg_values)
            self._emit_return(state, ra)
            if ret_target is not None:
                if ret is None:
                    raise EngineError(f"extern {name!r} produces no value")
                self._write_local(state, ret_target, ret)
            return
        env: dict[str, Value] = {}
        frame = _Frame(callee, env, [[callee.body, 0]], ret_target, ra, fid=state.next_fid)
        state.next_fid += 1
        for q, v in zip(callee.params, arg_values):
            env[q.name] = v
            if concrete_of(v) is None:
                state.taint.setdefault(as_expr(v), set()).add((frame.fid, q.name))
        self._emit_call(state, name, ra)
        state.frames.append(frame)

    def _return_from_frame(self, state: ExecState, value: Value | None) -> None:
        frame = state.frames.pop()
        if frame.return_address is not None:
            self._emit_return(state, frame.return_address)
        else:
            # entry frame: close the root record
            self._emit_return(state, 0)
        if not state.frames:
            state.status = "terminated"
            state.returned_value = value
            return
        if frame.ret_target is not None:
            if value is None:
                raise EngineError(f"{frame.fn.name!r} returned no value to assign")
            self._write_local(state, frame.ret_target, value)

    def _finish(self, state: ExecState, status: str) -> None:
        state.status = status

    # -- extern concretization -------------------------------------------------

    def concretize_at_extern(self, state: ExecState, callee: ast.FunctionDef,
                             arg_values: list[Value]) -> Value | None:
        """Bind symbolic arguments to smallest witnesses, then relax."""
        added: list[Atom] = []
        bound: list[tuple[ast.Expr, int]] = []
        for v in arg_values:
            if isinstance(v, int):
                continue
            expr = as_expr(v)
            witness = smallest_expr_value(state.constraint, state.domains, expr)
            if witness is None:
                raise EngineError("no witness for extern argument: unsat state")
            atom = Atom(ast.Binary("==", expr, ast.IntLit(witness)), True)
            state.constraint.append(atom)
            added.append(atom)
            bound.append((expr, witness))
        pure = "pure" in callee.attrs
        benign = "benign" in callee.attrs
        if pure or benign:
            for atom in added:
                state.constraint.remove(atom)
        if callee.ret_domain is None:
            return None
        if pure and bound:
            name = f"__{callee.name}_{state.next_fresh}"
            state.next_fresh += 1
            state.domains[name] = callee.ret_domain
            state.constraint.append(self._domain_seed_atom(name, callee.ret_domain))
            return ast.Var(name)
        # deterministic stub: smallest value of the return domain
        return next(iter(callee.ret_domain.values()))

    def concretize_all(self, state: ExecState, expr: ast.Expr) -> None:
        """Bind an expression and every location holding it to one witness."""
        if isinstance(expr, int):
            return
        witness = smallest_expr_value(state.constraint, state.domains, expr)
        if witness is None:
            raise EngineError("concretize_all on an unsatisfiable constraint")
        state.constraint.append(Atom(ast.Binary("==", expr, ast.IntLit(witness)), True))
        by_fid = {f.fid: f for f in state.frames}
        for fid, name in sorted(state.taint.get(expr, set())):
            frame = by_fid.get(fid)
            if frame is not None and frame.env.get(name) == expr:
                frame.env[name] = witness
        state.taint.pop(expr, None)

    # -- environment -------------------------------------------------------------

    def _lookup(self, state: ExecState, name: str) -> Value:
        frame = state.frames[-1]
        if name in frame.env:
            return frame.env[name]
        # configs/inputs live in the root frame's environment
        root = state.frames[0].env
        if name in root:
            return root[name]
        raise EngineError(f"unbound variable {name!r} in {frame.fn.name!r}")

    def _write_local(self, state: ExecState, name: str, value: Value) -> None:
        frame = state.frames[-1]
        old = frame.env.get(name)
        if old is not None and concrete_of(old) is None:
            holders = state.taint.get(old)
            if holders:
                holders.discard((frame.fid, name))
        frame.env[name] = value
        if concrete_of(value) is None:
            state.taint.setdefault(as_expr(value), set()).add((frame.fid, name))

    # -- cost accounting -----------------------------------------------------

    def _count_instruction(self, state: ExecState) -> None:
        if state.trace_enabled:
            state.cost_totals["instructions"] = state.cost_totals.get("instructions", 0) + 1

    def _apply_cost(self, state: ExecState, metric: str, amount: int) -> None:
        if metric == "latency":
            state.clock += amount
        if state.trace_enabled:
            state.cost_totals[metric] = state.cost_totals.get(metric, 0) + amount
            state.costs.append(KostRecord(metric, amount, state.clock, seq=state.next_seq))
            state.next_seq += 1

    # -- record emission -----------------------------------------------------

    def _emit_call(self, state: ExecState, fn_name: str, return_address: int) -> None:
        if state.trace_enabled:
            truth = None
            for cid in reversed(state.active_cids):
                if cid is not None:
                    truth = cid
                    break
            rec = CallRecord(
                cid=state.next_cid,
                eip=self.addrmap.entry_of(fn_name),
                return_address=return_address,
                timestamp=state.clock,
                thread_id=0,
                seq=state.next_seq,
                truth_parent=truth,
                offset=self.addrmap.offset(self.addrmap.entry_of(fn_name)),
            )
            state.calls.append(rec)
            state.active_cids.append(rec.cid)
            state.next_cid += 1
            state.next_seq += 1
        else:
            state.active_cids.append(None)

    def _emit_return(self, state: ExecState, return_address: int) -> None:
        if state.active_cids:
            state.active_cids.pop()
        if state.trace_enabled:
            state.returns.append(ReturnRecord(return_address, state.clock, 0,
                                              seq=state.next_seq))
            state.next_seq += 1

    # -- outputs ----------------------------------------------------------------

    def raw_trace(self, state: ExecState) -> RawTrace:
        canon = canonicalize(state.constraint, state.domains)
        totals = dict(state.cost_totals)
        totals["latency"] = totals.get("latency", 0)
        symbols = [(r.name, r.entry, r.end) for r in self.addrmap.ranges]
        return RawTrace(
            state_id=state.sid,
            status=state.status,
            load_base=self.addrmap.load_base,
            symbols=symbols,
            atom_texts=[c.text for c in canon],
            calls=state.calls,
            returns=state.returns,
            costs=state.costs,
            end_timestamp=state.clock,
            totals=totals,
            canon_atoms=canon,
        )

    def constraint_class_text(self, state: ExecState) -> str:
        return canonical_text(canonicalize(state.constraint, state.domains))


def tracer_start(state: ExecState) -> None:
    """Resume profiling: records and costs accumulate again."""
    state.trace_enabled = True


def tracer_stop(state: ExecState) -> None:
    """Pause profiling; the virtual clock keeps advancing."""
    state.trace_enabled = False


class _LoopRecheck:
    """Internal marker statement: re-evaluate a loop condition."""

    def __init__(self, st: ast.While, remaining: int):
        self.st = st
        self.remaining = remaining
        self.sid = st.sid
