"""Profiling records: emission buffers, call/return matching, call-chain
reconstruction, and the line-oriented trace file format.

Matching pairs each call with the earliest unmatched return carrying the
same return address (per thread); reconstruction assigns each call record
the parent whose entry address sits closest below the record's return
address.  Both operate purely on the records, never on engine state, so
hand-written traces exercise the same code paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..diagnostics import ModelError
from ..lang import ast
from .constraints import CanonAtom, parse_atom_text

TRACE_MAGIC = "violet-trace 1"


@dataclass
class CallRecord:
    cid: int
    eip: int
    return_address: int
    timestamp: int
    thread_id: int = 0
    seq: int = 0  # emission order across all record kinds
    parent_id: int | None = None  # filled by reconstruction
    truth_parent: int | None = None  # engine ground truth, not serialized
    offset: int = 0  # eip minus module load base
    # filled by matching / finalization:
    latency: int | None = None
    matched: bool = False
    self_latency: int = 0
    self_metrics: dict[str, int] = field(default_factory=dict)
    name: str = ""
    children: list[int] = field(default_factory=list)

    def key(self) -> tuple[int, int]:
        return (self.eip, self.return_address)


@dataclass
class ReturnRecord:
    return_address: int
    timestamp: int
    thread_id: int = 0
    seq: int = 0
    matched: bool = False


@dataclass
class KostRecord:
    """One `cost` statement hit: K lines in the trace file."""

    metric: str
    amount: int
    timestamp: int
    seq: int = 0


@dataclass
class RawTrace:
    """Everything the engine hands to (or the analyzer reads for) one state."""

    state_id: int
    status: str  # "terminated" | "budget-exceeded"
    load_base: int
    symbols: list[tuple[str, int, int]]  # (name, entry, end)
    atom_texts: list[str]  # canonical constraint atoms
    calls: list[CallRecord]
    returns: list[ReturnRecord]
    costs: list[KostRecord]
    end_timestamp: int
    totals: dict[str, int]  # full CostVector totals, metric -> value
    canon_atoms: list[CanonAtom] | None = None  # set on the in-memory path


def match_call_returns(calls: list[CallRecord], returns: list[ReturnRecord],
                       end_timestamp: int | None = None):
    """Pair calls with returns by return address, per thread.

    Returns (matches, unmatched_calls, unmatched_returns); matches are
    (call, return_or_None, latency).  Unmatched calls get latency to the
    state end when an end timestamp is known.
    """
    matches: list[tuple[CallRecord, ReturnRecord | None, int]] = []
    threads = sorted({c.thread_id for c in calls} | {r.thread_id for r in returns})
    unmatched_calls: list[CallRecord] = []
    unmatched_returns: list[ReturnRecord] = []
    for r in returns:
        r.matched = False
    for c in calls:
        c.matched = False
        c.latency = None
    for tid in threads:
        tcalls = [c for c in calls if c.thread_id == tid]
        treturns = [r for r in returns if r.thread_id == tid]
        for c in tcalls:
            hit = None
            for r in treturns:
                if not r.matched and r.return_address == c.return_address \
                        and r.timestamp >= c.timestamp:
                    hit = r
                    break
            if hit is not None:
                hit.matched = True
                c.matched = True
                c.latency = hit.timestamp - c.timestamp
                matches.append((c, hit, c.latency))
            else:
                c.matched = False
                if end_timestamp is not None:
                    c.latency = end_timestamp - c.timestamp
                unmatched_calls.append(c)
        unmatched_returns.extend(r for r in treturns if not r.matched)
    return matches, unmatched_calls, unmatched_returns


def reconstruct_call_chain(calls: list[CallRecord]) -> None:
    """Fill parent_id on each record from cid/address arithmetic.

    Parent of A = the record B with B.cid < A.cid, B.eip < A.return_address,
    and minimal (A.return_address − B.eip); ties go to the most recent cid.
    """
    by_thread: dict[int, list[CallRecord]] = {}
    for c in calls:
        by_thread.setdefault(c.thread_id, []).append(c)
    for recs in by_thread.values():
        recs.sort(key=lambda r: r.cid)
        for i, a in enumerate(recs):
            best: CallRecord | None = None
            best_d: int | None = None
            for b in recs[:i]:
                if b.eip < a.return_address:
                    d = a.return_address - b.eip
                    if best_d is None or d <= best_d:
                        best, best_d = b, d
            a.parent_id = best.cid if best is not None else None


def attribute_costs(calls: list[CallRecord], returns: list[ReturnRecord],
                    costs: list[KostRecord]) -> None:
    """Assign K records and self latency to the innermost open call.

    Uses the emission sequence: a call owns every cost emitted between its
    call and its matched return, minus what its children own.
    """
    events: list[tuple[int, str, object]] = []
    for c in calls:
        events.append((c.seq, "call", c))
    for r in returns:
        events.append((r.seq, "ret", r))
    for k in costs:
        events.append((k.seq, "cost", k))
    events.sort(key=lambda e: e[0])

    open_stack: list[CallRecord] = []
    for _, kind, obj in events:
        if kind == "call":
            c = obj
            c.self_metrics = {}
            open_stack.append(c)
        elif kind == "ret":
            r = obj
            # close the innermost call with this return address
            for i in range(len(open_stack) - 1, -1, -1):
                if open_stack[i].return_address == r.return_address:
                    del open_stack[i]
                    break
        else:
            k = obj
            if open_stack:
                owner = open_stack[-1]
                owner.self_metrics[k.metric] = owner.self_metrics.get(k.metric, 0) + k.amount
    # self latency = inclusive latency minus children's inclusive latencies
    by_cid = {c.cid: c for c in calls}
    for c in calls:
        c.children = []
    for c in calls:
        if c.parent_id is not None and c.parent_id in by_cid:
            by_cid[c.parent_id].children.append(c.cid)
    for c in calls:
        child_sum = sum((by_cid[ch].latency or 0) for ch in c.children)
        c.self_latency = max(0, (c.latency or 0) - child_sum)


# ---------------------------------------------------------------------------
# Trace file IO (documented in docs/formats.md)
# ---------------------------------------------------------------------------

def write_trace(path: str | Path, raw: RawTrace) -> None:
    lines = [f"V {TRACE_MAGIC}"]
    lines.append(f"S {raw.state_id} {raw.status}")
    lines.append(f"L 0x{raw.load_base:x}")
    for name, entry, end in raw.symbols:
        lines.append(f"F {name} 0x{entry:x} 0x{end:x}")
    for text in raw.atom_texts:
        lines.append(f"A {text}")
    events: list[tuple[int, str]] = []
    for c in raw.calls:
        events.append((c.seq, f"C {c.cid} 0x{c.eip:x} 0x{c.return_address:x} {c.timestamp} {c.thread_id}"))
    for r in raw.returns:
        events.append((r.seq, f"R 0x{r.return_address:x} {r.timestamp} {r.thread_id}"))
    for k in raw.costs:
        events.append((k.seq, f"K {k.metric} {k.amount} {k.timestamp}"))
    events.sort(key=lambda e: e[0])
    lines.extend(text for _, text in events)
    lines.append(f"E {raw.end_timestamp}")
    for metric in ast.ALL_METRICS:
        lines.append(f"M {metric} {raw.totals.get(metric, 0)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace(path: str | Path) -> RawTrace:
    text = Path(path).read_text(encoding="utf-8")
    state_id = -1
    status = "terminated"
    load_base = 0
    symbols: list[tuple[str, int, int]] = []
    atom_texts: list[str] = []
    calls: list[CallRecord] = []
    returns: list[ReturnRecord] = []
    costs: list[KostRecord] = []
    end_ts = 0
    totals: dict[str, int] = {}
    seq = 0
    saw_magic = False
    for ln, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.rstrip()
        if not line:
            continue
        tag, _, rest = line.partition(" ")
        try:
            if tag == "V":
                if rest != TRACE_MAGIC:
                    raise ModelError(f"unsupported trace version {rest!r}")
                saw_magic = True
            elif tag == "S":
                sid, status = rest.split()
                state_id = int(sid)
            elif tag == "L":
                load_base = int(rest, 16)
            elif tag == "F":
                name, entry, end = rest.split()
                symbols.append((name, int(entry, 16), int(end, 16)))
            elif tag == "A":
                atom_texts.append(rest)
            elif tag == "C":
                cid, eip, ra, ts, tid = rest.split()
                calls.append(CallRecord(int(cid), int(eip, 16), int(ra, 16),
                                        int(ts), int(tid), seq=seq))
            elif tag == "R":
                ra, ts, tid = rest.split()
                returns.append(ReturnRecord(int(ra, 16), int(ts), int(tid), seq=seq))
            elif tag == "K":
                metric, amount, ts = rest.split()
                costs.append(KostRecord(metric, int(amount), int(ts), seq=seq))
            elif tag == "E":
                end_ts = int(rest)
            elif tag == "M":
                metric, value = rest.split()
                totals[metric] = int(value)
            else:
                raise ModelError(f"unknown trace line tag {tag!r}")
        except (ValueError, ModelError) as e:
            raise ModelError(f"{path}:{ln}: bad trace line: {e}") from None
        seq += 1
    if not saw_magic:
        raise ModelError(f"{path}: not a violet trace file")
    return RawTrace(state_id, status, load_base, symbols, atom_texts,
                    calls, returns, costs, end_ts, totals)


# ---------------------------------------------------------------------------
# Finalization: raw records -> StateTrace
# ---------------------------------------------------------------------------

@dataclass
class StateTrace:
    state_id: int
    status: str
    atoms: list[CanonAtom]  # canonical constraint (branch decisions)
    cost: dict[str, int]  # full CostVector totals
    calls: list[CallRecord]  # matched, parented, with self metrics
    roots: list[int]  # cids with no parent
    total_latency: int
    end_timestamp: int
    unmatched_calls: list[int]
    unmatched_returns: int
    symbols: dict[int, str]  # entry address -> name

    def record(self, cid: int) -> CallRecord:
        for c in self.calls:
            if c.cid == cid:
                return c
        raise ModelError(f"no call record with cid {cid}")

    def chain_names(self, cid: int) -> list[str]:
        """Function names from the root to the given record."""
        by_cid = {c.cid: c for c in self.calls}
        chain: list[str] = []
        cur: int | None = cid
        while cur is not None:
            rec = by_cid[cur]
            chain.append(rec.name)
            cur = rec.parent_id
        return list(reversed(chain))


def finalize_trace(raw: RawTrace, program_like=None) -> StateTrace:
    """Match, reconstruct, and attribute one state's records."""
    calls = raw.calls
    returns = raw.returns
    _, unmatched_calls, unmatched_ret = match_call_returns(calls, returns, raw.end_timestamp)
    reconstruct_call_chain(calls)
    attribute_costs(calls, returns, raw.costs)
    sym = {entry: name for name, entry, _ in raw.symbols}
    for c in calls:
        c.name = sym.get(c.eip, f"0x{c.eip:x}")
        c.offset = c.eip - raw.load_base
    roots = [c.cid for c in calls if c.parent_id is None]
    total = 0
    if roots:
        root = min(roots)
        rec = next(c for c in calls if c.cid == root)
        total = rec.latency or 0
    if raw.canon_atoms is not None:
        atoms = raw.canon_atoms
    elif program_like is not None:
        atoms = [parse_atom_text(t, program_like) for t in raw.atom_texts]
    else:
        atoms = []
    return StateTrace(
        state_id=raw.state_id,
        status=raw.status,
        atoms=atoms,
        cost=dict(raw.totals),
        calls=sorted(calls, key=lambda c: c.cid),
        roots=sorted(roots),
        total_latency=total,
        end_timestamp=raw.end_timestamp,
        unmatched_calls=[c.cid for c in unmatched_calls],
        unmatched_returns=len(unmatched_ret),
        symbols=sym,
    )
