"""Exact-arithmetic verification: traces, permutation audits, tube checks.

Everything here is exact — averages are rationals, interval membership is
decided by rational comparison, and the brute-force envelope oracle
enumerates subsets.  Floating point appears only in the decimal rendering
of CSV output, which is display-only.
"""

from __future__ import annotations

import csv
import decimal
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import CoverageViolation, InjectivityViolation
from .extreal import ExtendedReal, as_fraction
from .rearrange import Rearrangement

__all__ = [
    "TraceEntry",
    "Trace",
    "trace",
    "iter_trace",
    "PermutationReport",
    "check_permutation",
    "check_tube",
    "check_schedule",
    "EnvelopeReport",
    "envelope_oracle",
    "verify_trace_identities",
    "downward_jump_bound_holds",
    "write_trace_csv",
    "read_trace_csv",
    "decimal_str",
]


class TraceEntry(NamedTuple):
    n: int
    source_index: int
    value: Fraction
    partial_sum: Fraction
    average: Fraction


@dataclass
class Trace:
    """Materialized prefix of a rearranged sequence with exact averages."""

    entries: List[TraceEntry]

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def average_at(self, n: int) -> Fraction:
        return self.entries[n - 1].average


def iter_trace(r: Rearrangement, n: Optional[int] = None) -> Iterator[TraceEntry]:
    """Stream trace entries without materializing them."""
    total = Fraction(0)
    count = 0
    for src, value in r.stream():
        count += 1
        total += value
        yield TraceEntry(count, src, value, total, total / count)
        if n is not None and count >= n:
            return


def trace(r: Rearrangement, n: int) -> Trace:
    if n < 1:
        raise ValueError("trace needs at least one entry")
    return Trace(list(iter_trace(r, n)))


def _entries(t) -> Iterable[TraceEntry]:
    return t.entries if isinstance(t, Trace) else t


# ---------------------------------------------------------------------------
# Permutation audit


@dataclass(frozen=True)
class PermutationReport:
    ok: bool
    distinct_checked: int
    coverage: Tuple[Tuple[int, int, int], ...]  # (probe, bound, satisfied_at)


def check_permutation(
    r: Rearrangement, n: int, probes: Sequence[int] = ()
) -> PermutationReport:
    """Audit injectivity of the first n outputs and coverage at each probe.

    For each probe p the bound f(p) = coverage_bound(p) must see every
    source index 1..p within the first f(p) outputs.  Raises
    InjectivityViolation / CoverageViolation on failure.
    """
    bounds = {p: r.coverage_bound(p) for p in probes}
    horizon = max([n, *bounds.values()]) if bounds else n
    first_seen = {}
    remaining = {p: set(range(1, p + 1)) for p in probes}
    satisfied = {}
    rank = 0
    for src, _value in r.stream():
        rank += 1
        if rank <= n:
            prev = first_seen.get(src)
            if prev is not None:
                raise InjectivityViolation(src, prev, rank)
            first_seen[src] = rank
        for p in probes:
            need = remaining[p]
            if need and src in need:
                need.discard(src)
                if not need:
                    satisfied[p] = rank
        if rank >= horizon:
            break
    for p in probes:
        if p in satisfied and satisfied[p] <= bounds[p]:
            continue
        raise CoverageViolation(p, bounds[p])
    coverage = tuple((p, bounds[p], satisfied[p]) for p in sorted(probes))
    return PermutationReport(True, min(n, rank), coverage)


# ---------------------------------------------------------------------------
# Tube and schedule checks


def check_tube(t, target, eps, from_index: int = 1) -> bool:
    """True iff every average from the given position onward sits in the tube.

    Finite targets use the open interval (target-eps, target+eps); infinite
    targets require |average| beyond M = 1/eps on the matching side.
    """
    target = ExtendedReal.of(target)
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if target.is_finite:
        lo = target.value - eps
        hi = target.value + eps
        for entry in _entries(t):
            if entry.n >= from_index and not (lo < entry.average < hi):
                return False
        return True
    threshold = 1 / eps
    if target.is_pos_inf:
        for entry in _entries(t):
            if entry.n >= from_index and not entry.average > threshold:
                return False
        return True
    for entry in _entries(t):
        if entry.n >= from_index and not entry.average < -threshold:
            return False
    return True


def check_schedule(t, schedule) -> bool:
    """True iff averages obey every schedule window.

    Window k constrains positions [from_k, from_{k+1}) — the last window
    extends to the end of the trace — to the open interval (lo_k, hi_k).
    """
    entries = list(schedule)
    if not entries:
        return True
    idx = -1
    lo = hi = None
    next_from = entries[0].from_index
    for te in _entries(t):
        while next_from is not None and te.n >= next_from:
            idx += 1
            lo, hi = entries[idx].lo, entries[idx].hi
            next_from = (
                entries[idx + 1].from_index if idx + 1 < len(entries) else None
            )
        if idx < 0:
            continue
        if not (lo < te.average < hi):
            return False
    return True


# ---------------------------------------------------------------------------
# Brute-force envelope oracle


@dataclass(frozen=True)
class EnvelopeReport:
    min_avg: Fraction
    max_avg: Fraction
    achievable: Optional[Tuple[Fraction, ...]]  # sorted, only for <= 12 values


ORACLE_ENUMERATION_CAP = 12


def envelope_oracle(values, k: int) -> EnvelopeReport:
    """Exact min/max average over k-element subsets, with full enumeration
    of the achievable averages when at most 12 values are given."""
    vals = sorted(as_fraction(v) for v in values)
    if not 1 <= k <= len(vals):
        raise ValueError(f"k must be within 1..{len(vals)}")
    min_avg = sum(vals[:k]) / k
    max_avg = sum(vals[-k:]) / k
    achievable = None
    if len(vals) <= ORACLE_ENUMERATION_CAP:
        seen = {sum(c) / k for c in combinations(vals, k)}
        achievable = tuple(sorted(seen))
    return EnvelopeReport(min_avg, max_avg, achievable)


# ---------------------------------------------------------------------------
# Exact identities used by the test invariants


def verify_trace_identities(t, limit: Optional[int] = None) -> bool:
    """Exact sum/recurrence/jump identities at every entry (zero tolerance).

    average*n == partial_sum; the recurrence
    average_n == average_{n-1}*(n-1)/n + value_n/n; and the jump identity
    average_{n-1} - average_n == (average_{n-1} - value_n)/n.
    """
    prev_avg = None
    for entry in _entries(t):
        if limit is not None and entry.n > limit:
            break
        if entry.average * entry.n != entry.partial_sum:
            return False
        if prev_avg is not None:
            n = entry.n
            if entry.average != prev_avg * (n - 1) / n + entry.value / n:
                return False
            if prev_avg - entry.average != (prev_avg - entry.value) / n:
                return False
        prev_avg = entry.average
    return True


def downward_jump_bound_holds(t, level, value_bound) -> bool:
    """Bound on downward crossings of a level by averages of bounded-below values.

    If every value exceeds K, then whenever the average drops to p or below
    at step n, the drop satisfies
    average_{n-1} - average_n <= (p - K)/(n - 1).
    """
    p = as_fraction(level)
    k_bound = as_fraction(value_bound)
    prev_avg = None
    for entry in _entries(t):
        if entry.value <= k_bound:
            raise ValueError(
                f"value {entry.value} at n={entry.n} is not above {k_bound}"
            )
        if (
            prev_avg is not None
            and entry.average <= p < prev_avg
            and prev_avg - entry.average > (p - k_bound) / (entry.n - 1)
        ):
            return False
        prev_avg = entry.average
    return True


# ---------------------------------------------------------------------------
# CSV boundary

CSV_HEADER = [
    "n",
    "source_index",
    "value",
    "partial_sum",
    "average_decimal",
    "average_exact",
]

_DECIMAL_CTX = decimal.Context(prec=12, rounding=decimal.ROUND_HALF_EVEN)


def decimal_str(q: Fraction) -> str:
    """12 significant digits, round-half-even — display only."""
    return str(
        _DECIMAL_CTX.divide(
            decimal.Decimal(q.numerator), decimal.Decimal(q.denominator)
        )
    )


def _exact_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _parse_exact(text: str) -> Fraction:
    return Fraction(text)


def write_trace_csv(t, stream) -> None:
    """Write a trace in the canonical CSV layout (exact fields as p/q)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for e in _entries(t):
        writer.writerow(
            [
                e.n,
                e.source_index,
                _exact_str(e.value),
                _exact_str(e.partial_sum),
                decimal_str(e.average),
                _exact_str(e.average),
            ]
        )


def read_trace_csv(stream) -> Trace:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ValueError("not a trace file: unexpected header")
    entries = []
    for row in reader:
        if not row:
            continue
        n = int(row[0])
        entries.append(
            TraceEntry(
                n,
                int(row[1]),
                _parse_exact(row[2]),
                _parse_exact(row[3]),
                _parse_exact(row[5]),
            )
        )
    return Trace(entries)
