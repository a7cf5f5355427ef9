"""Rearrangement constructors: lazy injective index streams steering averages.

Every constructor here returns a ``Rearrangement``: a deterministic stream of
``(source_index, value)`` pairs that is injective by construction and comes
with a coverage bound certifying eventual surjectivity, i.e. the stream
really is a bijective reindexing of the source sequence.

Streams are lazy and restartable: ``stream()`` always starts a fresh,
independent iterator (the constructors are deterministic, so every restart
replays the same emissions), while ``next()`` advances a single shared
cursor for consumers that want stateful reading.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Tuple

from .balance import BalanceKind, Condition, balanced_verdict, density_report
from .errors import (
    DegenerateRange,
    DensityFails,
    MalformedDescriptor,
    NotBalanced,
    NotDivergent,
    TargetNotAbove,
    TargetUnreachable,
    UndeclaredLimit,
    UnknownProfile,
    WeightOutOfRange,
)
from .extreal import NEG_INF, POS_INF, ExtendedReal, as_fraction
from .seqspec import (
    Affine,
    Decomposition,
    ExplicitPrefix,
    Geometric,
    Interleave,
    Linear,
    PointwiseSquare,
    PowerOfIndex,
    RunLength,
    SequenceSpec,
    SumJump,
    decompose,
    negated_spec,
    profile,
)

Emission = Tuple[int, Fraction]
TaggedEmission = Tuple[int, Fraction, str]


# ---------------------------------------------------------------------------
# Running average with exact comparisons

class RunningAverage:
    """Exact running mean with cheap ordered comparisons.

    Keeps the sum as an unreduced numerator/denominator pair so that integer
    -valued streams never pay for rational normalization; comparisons against
    rational bounds are integer cross-multiplications.
    """

    __slots__ = ("n", "num", "den")

    def __init__(self):
        self.n = 0
        self.num = 0
        self.den = 1

    def add(self, value: Fraction):
        vn, vd = value.numerator, value.denominator
        if vd == 1:
            if self.den == 1:
                self.num += vn
            else:
                self.num += vn * self.den
        else:
            self.num = self.num * vd + vn * self.den
            self.den *= vd
            if self.den > 1 << 128:
                g = math.gcd(self.num, self.den)
                if g > 1:
                    self.num //= g
                    self.den //= g
        self.n += 1

    def average(self) -> Fraction:
        return Fraction(self.num, self.den * self.n)

    def cmp(self, bound: Fraction) -> int:
        """Sign of (average - bound); requires n >= 1."""
        lhs = self.num * bound.denominator
        rhs = bound.numerator * self.den * self.n
        return (lhs > rhs) - (lhs < rhs)

    def within(self, lo: Fraction, hi: Fraction) -> bool:
        """Strictly inside the open interval (lo, hi)."""
        return self.cmp(lo) > 0 and self.cmp(hi) < 0

    def post_cmp(self, value: Fraction, bound: Fraction) -> int:
        """cmp() as it would read after also adding ``value``."""
        vn, vd = value.numerator, value.denominator
        num = self.num * vd + vn * self.den
        den = self.den * vd
        lhs = num * bound.denominator
        rhs = bound.numerator * den * (self.n + 1)
        return (lhs > rhs) - (lhs < rhs)

    def post_within(self, value: Fraction, lo: Fraction, hi: Fraction) -> bool:
        return self.post_cmp(value, lo) > 0 and self.post_cmp(value, hi) < 0


# ---------------------------------------------------------------------------
# Part streams and the Rearrangement type

IndexMap = Callable[[int], int]


@dataclass(frozen=True, eq=False)
class PartStream:
    """One convergent strand of a source: spec + witness back to source indices."""

    spec: SequenceSpec
    witness: IndexMap
    limit: ExtendedReal

    def emissions(self) -> Iterator[Emission]:
        w = self.witness
        for k, value in enumerate(self.spec.iter_terms(), start=1):
            yield w(k), value

    @staticmethod
    def whole(spec: SequenceSpec, limit=None) -> "PartStream":
        if limit is None:
            limit = profile(spec).converges_to()
            if limit is None:
                raise UndeclaredLimit("part has no single limit")
        return PartStream(spec, lambda k: k, ExtendedReal.of(limit))

    @staticmethod
    def from_decomposition(dec: Decomposition, part: str) -> Optional["PartStream"]:
        spec = dec.part_spec(part)
        if spec is None:
            return None
        limits = {"b": dec.b_limit, "c": dec.c_limit}
        limit = limits.get(part)
        if limit is None:
            # The d-part may fold strands with several different limits;
            # it is only ever used as an extras pool, so no limit is needed.
            limit = _limit_of(spec)
        return PartStream(spec, lambda k, p=part: dec.witness(p, k), limit)


class Rearrangement:
    """Deterministic lazy rearrangement of a source sequence."""

    def __init__(
        self,
        source: SequenceSpec,
        factory: Callable[[], Iterator[TaggedEmission]],
        coverage_bound: Callable[[int], int],
        name: str,
        limit_in_average: Optional[ExtendedReal] = None,
        meta: Optional[dict] = None,
    ):
        self.source = source
        self._factory = factory
        self.coverage_bound = coverage_bound
        self.name = name
        self.limit_in_average = limit_in_average
        self.meta = dict(meta or {})
        self._cursor = None

    def tagged_stream(self) -> Iterator[TaggedEmission]:
        """Fresh (source_index, value, tag) iterator from the beginning."""
        return self._factory()

    def stream(self) -> Iterator[Emission]:
        """Fresh (source_index, value) iterator from the beginning."""
        for src, value, _tag in self._factory():
            yield src, value

    def next(self) -> Emission:
        """Stateful single-consumer read."""
        if self._cursor is None:
            self._cursor = self._factory()
        src, value, _tag = next(self._cursor)
        return src, value

    def __repr__(self):
        return f"Rearrangement({self.name})"


def observed_coverage_bound(rearr_factory: Callable[[], Iterator[TaggedEmission]]):
    """Coverage bound certified by replaying the deterministic stream.

    f(n) is twice the first output rank by which source indices 1..n have
    all appeared (plus slack).  Valid because streams replay identically.
    """
    cache: dict = {}
    state = {"it": None, "rank": 0, "missing_below": 1, "seen": set()}

    def bound(n: int) -> int:
        if n in cache:
            return cache[n]
        if state["it"] is None:
            state["it"] = rearr_factory()
        it, seen = state["it"], state["seen"]
        while state["missing_below"] <= n:
            src, _value, _tag = next(it)
            state["rank"] += 1
            if src >= state["missing_below"]:
                seen.add(src)
                while state["missing_below"] in seen:
                    seen.discard(state["missing_below"])
                    state["missing_below"] += 1
        cache[n] = 2 * state["rank"] + 16
        return cache[n]

    return bound


def identity_rearrangement(
    spec: SequenceSpec, limit_in_average: Optional[ExtendedReal] = None
) -> Rearrangement:
    def factory():
        for n, value in enumerate(spec.iter_terms(), start=1):
            yield n, value, "core"

    return Rearrangement(
        source=spec,
        factory=factory,
        coverage_bound=lambda n: n,
        name="identity",
        limit_in_average=limit_in_average,
    )


# ---------------------------------------------------------------------------
# Extras insertion gate (limit-preserving merge conditions)


class _InsertionGate:
    """Decides when the next deferred element may enter the stream.

    The l-th extra (value e) may be emitted at position n+1 once the three
    exact conditions hold for eps = 2^-l: the running average is within
    eps/3 of the limit, |e|/(n+1) < eps/3, and |average|/(n+1) < eps/3 —
    together they keep the post-insertion average within eps of the limit.
    For infinite limits the conditions use the threshold M = 2^(l+1):
    |average| beyond M+2, |e|/(n+1) < 1, and n+1 > M+2.
    """

    def __init__(self, limit: ExtendedReal):
        self.limit = limit
        self.level = 0
        self._advance()

    def _advance(self):
        self.level += 1
        self.eps3 = Fraction(1, 3 * (1 << self.level))  # (2^-l)/3
        self.m_threshold = 1 << (self.level + 1)  # 2^(l+1)

    def admits(self, avg: RunningAverage, value: Fraction) -> bool:
        if avg.n == 0:
            return False
        n1 = avg.n + 1
        if self.limit.is_finite:
            l_val = self.limit.value
            if not (avg.cmp(l_val - self.eps3) > 0 and avg.cmp(l_val + self.eps3) < 0):
                return False
            if abs(value) >= self.eps3 * n1:
                return False
            # |average| / (n+1) < eps/3, cross-multiplied exactly
            if abs(avg.num) * avg.den >= self.eps3 * (avg.den**2) * avg.n * n1:
                return False
            return True
        m2 = self.m_threshold + 2
        if n1 <= m2:
            return False
        if abs(value) >= n1:
            return False
        if self.limit.is_pos_inf:
            return avg.cmp(Fraction(m2)) > 0
        return avg.cmp(Fraction(-m2)) < 0

    def consumed(self):
        self._advance()


def _extras_factory(extras):
    """Normalize an extras argument to a zero-arg emission-iterator factory."""
    if extras is None:
        return lambda: iter(())
    if isinstance(extras, PartStream):
        return extras.emissions
    if callable(extras):
        return extras
    frozen = tuple(extras)
    return lambda: iter(frozen)


def merge_preserving(core: Rearrangement, extras) -> Rearrangement:
    """Weave deferred elements into a stream without moving its average limit.

    ``extras`` is an ordered collection (or stream factory) of
    (source_index, value) pairs; each is inserted at the first position
    satisfying the insertion gate for its level, so perturbations shrink
    geometrically and the core's declared limit survives.
    """
    if core.limit_in_average is None:
        raise UndeclaredLimit("core rearrangement has no declared average limit")
    limit = core.limit_in_average
    extras_f = _extras_factory(extras)

    def factory():
        gate = _InsertionGate(limit)
        avg = RunningAverage()
        pending = None
        extras_it = extras_f()
        for src, value, tag in core.tagged_stream():
            while True:
                if pending is None:
                    pending = next(extras_it, None)
                if pending is None or not gate.admits(avg, pending[1]):
                    break
                yield pending[0], pending[1], "extra"
                avg.add(pending[1])
                gate.consumed()
                pending = None
            yield src, value, tag
            avg.add(value)

    return Rearrangement(
        source=core.source,
        factory=factory,
        coverage_bound=observed_coverage_bound(factory),
        name=f"merge_preserving({core.name})",
        limit_in_average=limit,
        meta=dict(core.meta),
    )


# ---------------------------------------------------------------------------
# Weighted merge of two convergent streams


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def weighted_merge(
    a_stream: PartStream, b_stream: PartStream, alpha: Fraction
) -> Rearrangement:
    """Interleave two convergent streams with asymptotic density alpha : 1-alpha.

    Positions are grouped into consecutive blocks of rational length
    gamma = 1/alpha; the first position of each block takes the next
    a-element and the rest take b-elements, so a prefix of length m holds
    m*alpha + O(1) a-elements and the average tends to
    alpha*a + (1-alpha)*b.
    """
    alpha = as_fraction(alpha)
    if alpha < 0 or alpha > 1:
        raise WeightOutOfRange(f"alpha must lie in [0, 1], got {alpha}")
    if not (a_stream.limit.is_finite and b_stream.limit.is_finite):
        raise UndeclaredLimit("weighted merge needs finite declared limits")
    a_lim, b_lim = a_stream.limit.value, b_stream.limit.value
    target = ExtendedReal(alpha * a_lim + (1 - alpha) * b_lim)

    if alpha == 0:
        core = Rearrangement(
            source=b_stream.spec,
            factory=lambda: ((b_stream.witness(k), v, "core")
                             for k, v in enumerate(b_stream.spec.iter_terms(), 1)),
            coverage_bound=observed_coverage_bound_of_part(b_stream),
            name="weighted_merge[alpha=0]",
            limit_in_average=b_stream.limit,
        )
        return merge_preserving(core, a_stream)
    if alpha == 1:
        core = Rearrangement(
            source=a_stream.spec,
            factory=lambda: ((a_stream.witness(k), v, "core")
                             for k, v in enumerate(a_stream.spec.iter_terms(), 1)),
            coverage_bound=observed_coverage_bound_of_part(a_stream),
            name="weighted_merge[alpha=1]",
            limit_in_average=a_stream.limit,
        )
        return merge_preserving(core, b_stream)

    swap = alpha > Fraction(1, 2)
    lead, other = (b_stream, a_stream) if swap else (a_stream, b_stream)
    gamma = 1 / ((1 - alpha) if swap else alpha)  # >= 2

    def factory():
        lead_it = lead.emissions()
        other_it = other.emissions()
        block = 1
        next_head = 1  # first position of block 1
        pos = 0
        while True:
            pos += 1
            if pos == next_head:
                src, value = next(lead_it)
                yield src, value, "lead"
                block += 1
                next_head = max(pos + 1, _ceil_frac((block - 1) * gamma))
            else:
                src, value = next(other_it)
                yield src, value, "other"

    g_ceil = _ceil_frac(gamma)

    def coverage(n: int) -> int:
        return g_ceil * (n + 1)

    return Rearrangement(
        source=None,
        factory=factory,
        coverage_bound=coverage,
        name=f"weighted_merge[alpha={alpha}]",
        limit_in_average=target,
        meta={"alpha": alpha, "gamma": gamma, "swapped": swap},
    )


def observed_coverage_bound_of_part(part: PartStream):
    def factory():
        for src, v in part.emissions():
            yield src, v, "core"

    return observed_coverage_bound(factory)


# ---------------------------------------------------------------------------
# Finite targets inside [liminf, limsup]


def bounded_target(spec: SequenceSpec, l) -> Rearrangement:
    """Rearrange a bounded spec so its average tends to l.

    Splits the source into strands at the liminf and limsup (plus a rest),
    weight-merges the extreme strands with the weight solving
    l = alpha*liminf + (1-alpha)*limsup, and re-inserts the rest without
    disturbing the limit.
    """
    l = as_fraction(l)
    prof = profile(spec)
    if not (prof.liminf.is_finite and prof.limsup.is_finite):
        raise MalformedDescriptor("bounded_target needs a bounded profile")
    m, big_m = prof.liminf.value, prof.limsup.value
    if l < m or l > big_m:
        raise TargetUnreachable(
            f"target {l} outside [{m}, {big_m}]"
        )
    dec = decompose(spec, prof)
    if m == big_m:
        core = identity_rearrangement(spec, limit_in_average=ExtendedReal(m))
        core.name = "bounded_target[degenerate]"
        return core
    alpha = (big_m - l) / (big_m - m)
    b_part = PartStream.from_decomposition(dec, "b")
    c_part = PartStream.from_decomposition(dec, "c")
    merged = weighted_merge(b_part, c_part, alpha)
    merged.source = spec
    d_part = PartStream.from_decomposition(dec, "d")
    if d_part is not None:
        merged = merge_preserving(merged, d_part)
        merged.source = spec
    merged.meta["target"] = l
    merged.name = f"bounded_target[{l}]"
    return merged


def oscillator(spec: SequenceSpec) -> Rearrangement:
    """Rearrange a bounded spec so its average oscillates forever.

    With liminf m < limsup M, the running average is driven below
    p = m + (M-m)/3 using liminf-strand elements, then above
    q = M - (M-m)/3 using limsup-strand elements, with one rest element
    emitted at each turn; the average therefore has no limit.
    """
    prof = profile(spec)
    if not (prof.liminf.is_finite and prof.limsup.is_finite):
        raise MalformedDescriptor("oscillator needs a bounded profile")
    m, big_m = prof.liminf.value, prof.limsup.value
    if m == big_m:
        raise DegenerateRange("liminf equals limsup; nothing to oscillate")
    p = m + (big_m - m) / 3
    q = big_m - (big_m - m) / 3
    dec = decompose(spec, prof)
    b_part = PartStream.from_decomposition(dec, "b")
    c_part = PartStream.from_decomposition(dec, "c")
    d_part = PartStream.from_decomposition(dec, "d")

    def factory():
        avg = RunningAverage()
        b_it = b_part.emissions()
        c_it = c_part.emissions()
        d_it = d_part.emissions() if d_part is not None else iter(())

        def emit(pair, tag):
            src, value = pair
            avg.add(value)
            return src, value, tag

        while True:
            rest = next(d_it, None)
            if rest is not None:
                yield emit(rest, "rest")
            yield emit(next(b_it), "low")
            while avg.cmp(p) >= 0:
                yield emit(next(b_it), "low")
            rest = next(d_it, None)
            if rest is not None:
                yield emit(rest, "rest")
            yield emit(next(c_it), "high")
            while avg.cmp(q) <= 0:
                yield emit(next(c_it), "high")

    factory_bound = observed_coverage_bound(factory)
    return Rearrangement(
        source=spec,
        factory=factory,
        coverage_bound=factory_bound,
        name="oscillator",
        limit_in_average=None,
        meta={"p": p, "q": q},
    )


# ---------------------------------------------------------------------------
# Sorting a divergent part


def _eventually_nondecreasing(spec: SequenceSpec) -> bool:
    if isinstance(spec, (Linear, PowerOfIndex, Geometric, RunLength, SumJump)):
        return True
    if isinstance(spec, Affine):
        return spec.scale > 0 and _eventually_nondecreasing(spec.base)
    if isinstance(spec, PointwiseSquare):
        return _eventually_nondecreasing(spec.base)
    if isinstance(spec, ExplicitPrefix):
        return _eventually_nondecreasing(spec.tail)
    return False


def _sorted_emissions(part: PartStream) -> Iterator[Emission]:
    """Emissions of a +inf part in nondecreasing value order (ties by index).

    Works for interleaves of catalog strands that are nondecreasing after a
    finite prefix; explicit prefixes are buffered until the tail passes them.
    """
    import heapq

    strands: List[Tuple[SequenceSpec, IndexMap]] = []

    def collect(spec: SequenceSpec, wit: IndexMap):
        if isinstance(spec, Interleave):
            collect(spec.first, lambda k, w=wit: w(2 * k - 1))
            collect(spec.second, lambda k, w=wit: w(2 * k))
            return
        strands.append((spec, wit))

    collect(part.spec, part.witness)

    # Each strand yields (value, src) nondecreasing; buffer explicit prefixes.
    def strand_iter(spec: SequenceSpec, wit: IndexMap):
        buffered: List[Tuple[Fraction, int]] = []
        offset = 0
        body = spec
        while isinstance(body, ExplicitPrefix):
            for i, v in enumerate(body.values, start=1):
                buffered.append((v, wit(offset + i)))
            offset += len(body.values)
            body = body.tail
        if not _eventually_nondecreasing(body):
            raise NotDivergent(
                f"cannot stream-sort a {type(body).__name__} strand"
            )
        buffered.sort()
        pending = deque(buffered)
        for k, v in enumerate(body.iter_terms(), start=1):
            src = wit(offset + k)
            while pending and pending[0] <= (v, src):
                pv, psrc = pending.popleft()
                yield pv, psrc
            yield v, src

    iters = [strand_iter(s, w) for s, w in strands]
    merged = heapq.merge(*iters)
    for value, src in merged:
        yield src, value


def sort_increasing(c_part) -> Rearrangement:
    """Emit a +inf-tending part in nondecreasing value order."""
    if isinstance(c_part, SequenceSpec):
        c_part = PartStream.whole(c_part)
    if c_part.limit != POS_INF:
        raise NotDivergent("sort_increasing needs a part tending to +inf")

    def factory():
        for src, value in _sorted_emissions(c_part):
            yield src, value, "core"

    return Rearrangement(
        source=c_part.spec,
        factory=factory,
        coverage_bound=observed_coverage_bound(factory),
        name="sort_increasing",
        limit_in_average=POS_INF,
    )


# ---------------------------------------------------------------------------
# Finite target above the bounded part's limsup


def target_above_limsup(
    b_part: PartStream, c_part: PartStream, target
) -> Rearrangement:
    """Achieve a finite average strictly above the bounded strand's limit.

    The divergent strand is sorted, its values not exceeding
    max{1, 2(target-b)} are deferred, and the n-th surviving value is
    emitted exactly at output index floor(s_n / (target-b)) where s_n is
    the running sum of survivors; all other slots carry bounded-strand
    elements (or, once admissible, deferred survivors' gate-fed returns).
    """
    target = as_fraction(target)
    if not b_part.limit.is_finite:
        raise TargetNotAbove("bounded strand must have a finite limit")
    b_lim = b_part.limit.value
    if target <= b_lim:
        raise TargetNotAbove(f"target {target} is not above {b_lim}")
    verdict = balanced_verdict(c_part.spec)
    if verdict.kind is not BalanceKind.BALANCED:
        raise NotBalanced(
            f"divergent strand is not balanced ({verdict.kind.value}: {verdict.reason})"
        )
    v = 1 / (target - b_lim)
    bar = max(Fraction(1), 2 * (target - b_lim))
    limit = ExtendedReal(target)

    def split_sorted():
        """Deferred initial segment (<= bar) and the surviving iterator."""
        it = _sorted_emissions(c_part)
        deferred = []
        first_survivor = None
        for src, value in it:
            if value > bar:
                first_survivor = (src, value)
                break
            deferred.append((src, value))
        return deferred, first_survivor, it

    def factory():
        deferred, first_survivor, surv_it = split_sorted()
        gate = _InsertionGate(limit)
        extras = deque(deferred)
        avg = RunningAverage()
        b_it = b_part.emissions()
        pos = 0
        last_slot = 0
        s = Fraction(0)
        survivor = first_survivor
        while True:
            s += survivor[1]
            slot = math.floor(v * s)
            if slot <= last_slot:
                slot = last_slot + 1  # safety bump; filter should prevent this
            while pos + 1 < slot:
                # fill with a deferred element when the gate allows, else
                # with the next bounded-strand element
                if extras and gate.admits(avg, extras[0][1]):
                    src, value = extras.popleft()
                    gate.consumed()
                    tag = "extra"
                else:
                    src, value = next(b_it)
                    tag = "fill"
                pos += 1
                avg.add(value)
                yield src, value, tag
            pos += 1
            last_slot = slot
            avg.add(survivor[1])
            yield survivor[0], survivor[1], "place"
            survivor = next(surv_it)

    def meta_placements(count: int):
        """Expected (slot, source_index, value) for the first placements."""
        deferred, first_survivor, surv_it = split_sorted()
        out = []
        s = Fraction(0)
        last = 0
        survivor = first_survivor
        while len(out) < count:
            s += survivor[1]
            slot = math.floor(v * s)
            if slot <= last:
                slot = last + 1
            last = slot
            out.append((slot, survivor[0], survivor[1]))
            survivor = next(surv_it)
        return out

    return Rearrangement(
        source=None,
        factory=factory,
        coverage_bound=observed_coverage_bound(factory),
        name=f"target_above_limsup[{target}]",
        limit_in_average=limit,
        meta={
            "target": target,
            "b_limit": b_lim,
            "rate": v,
            "bar": bar,
            "placements": meta_placements,
        },
    )


def rescale_target(base: Rearrangement, new_target) -> Rearrangement:
    """Move a placement-style construction to a new finite target.

    The base must tag its emissions place/fill/extra and declare its target
    and bounded-strand limit a.  Working in the conjugated picture
    x -> (x-a)/(t-a) (pure bookkeeping, values are never transformed), the
    new target l maps to lt = (l-a)/(t-a): fills are first thinned to one
    in ceil(lt), overshooting to the integer level L = ceil(lt), then
    floor(k*(L/lt - 1)) extra fill elements are interposed before the k-th
    placement to pad back down to lt.  Thinned-out fills re-enter through
    the insertion gate.
    """
    if "target" not in base.meta or "b_limit" not in base.meta:
        raise UndeclaredLimit("base rearrangement does not declare its target")
    t = base.meta["target"]
    a = base.meta["b_limit"]
    l = as_fraction(new_target)
    if l <= a:
        raise TargetNotAbove(f"new target {l} is not above {a}")
    lt = (l - a) / (t - a)
    big_l = _ceil_frac(lt)
    pad_rate = Fraction(big_l, 1) / lt - 1  # L/lt - 1 >= 0
    limit = ExtendedReal(l)

    def factory():
        base_it = base.tagged_stream()
        pool: deque = deque()  # arrived fill elements awaiting emission
        extra_q: deque = deque()
        place_q: deque = deque()
        fills_arrived = 0
        kept_credits = 0  # one credit per L-th arriving fill

        def pull():
            nonlocal fills_arrived, kept_credits
            src, value, tag = next(base_it)
            if tag == "place":
                # freeze this placement's fill quota when it arrives, so
                # borrowing ahead later cannot inflate its own schedule
                quota = kept_credits + math.floor(kept_credits * pad_rate)
                place_q.append((src, value, quota))
            elif tag == "extra":
                extra_q.append((src, value))
            else:
                fills_arrived += 1
                if fills_arrived % big_l == 0:
                    kept_credits += 1
                pool.append((src, value))

        gate = _InsertionGate(limit)
        avg = RunningAverage()
        fills_emitted = 0

        def emit(src, value, tag):
            avg.add(value)
            return src, value, tag

        while True:
            # deferred elements re-enter once the gate admits them; the fill
            # pool's surplus (when fewer fills are scheduled than arrive)
            # drains the same way, so every source element eventually appears
            while True:
                pending_q = extra_q if extra_q else pool
                if not pending_q or not gate.admits(avg, pending_q[0][1]):
                    break
                src, value = pending_q.popleft()
                gate.consumed()
                yield emit(src, value, "extra")

            if not place_q:
                pull()
                continue
            # cumulative counts: each placement waits for its fill quota
            # (kept fills plus floor(kept * pad_rate) pads, elements fungible)
            if fills_emitted < place_q[0][2]:
                while not pool:
                    pull()  # borrow ahead from later fills when short
                src, value = pool.popleft()
                fills_emitted += 1
                yield emit(src, value, "fill")
                continue
            src, value, _quota = place_q.popleft()
            yield emit(src, value, "place")

    return Rearrangement(
        source=base.source,
        factory=factory,
        coverage_bound=observed_coverage_bound(factory),
        name=f"rescale_target[{l}]",
        limit_in_average=limit,
        meta={"target": l, "b_limit": a, "base_target": t},
    )


# ---------------------------------------------------------------------------
# Two-sided balance: finite targets from opposite infinities


def _strand_for_path(part: PartStream, path: Tuple[str, ...]):
    """Select an interleave strand by path; siblings become leftover parts."""
    selected_spec = part.spec
    selected_wit = part.witness
    leftovers: List[PartStream] = []
    for step in path:
        if not isinstance(selected_spec, Interleave):
            raise DensityFails("density path does not match the part structure")
        first_w = (lambda k, w=selected_wit: w(2 * k - 1))
        second_w = (lambda k, w=selected_wit: w(2 * k))
        if step == "first":
            sibling = PartStream(selected_spec.second, second_w,
                                 _limit_of(selected_spec.second))
            selected_spec, selected_wit = selected_spec.first, first_w
        else:
            sibling = PartStream(selected_spec.first, first_w,
                                 _limit_of(selected_spec.first))
            selected_spec, selected_wit = selected_spec.second, second_w
        leftovers.append(sibling)
    return PartStream(selected_spec, selected_wit, part.limit), leftovers


def _limit_of(spec: SequenceSpec) -> Optional[ExtendedReal]:
    try:
        return profile(spec).converges_to()
    except UnknownProfile:
        return None


def two_sided_balance(
    b_part: PartStream, c_part: PartStream, target, extras=None
) -> Rearrangement:
    """Achieve any finite average target from strands diverging to -inf/+inf.

    Requires both strands to satisfy the liminf |term|/n = 0 density
    condition; the qualifying sub-strands alternate greedily around the
    target (elements from the +inf side while the average is below, from
    the -inf side while above).  Everything else is deferred and re-enters
    through the insertion gate.
    """
    target = as_fraction(target)
    if b_part.limit != NEG_INF:
        raise DensityFails("first part must tend to -inf")
    if c_part.limit != POS_INF:
        raise DensityFails("second part must tend to +inf")
    rep_b = density_report(b_part.spec)
    if rep_b.condition is not Condition.HOLDS:
        raise DensityFails(
            f"negative side: {rep_b.reason} ({rep_b.condition.value})"
        )
    rep_c = density_report(c_part.spec)
    if rep_c.condition is not Condition.HOLDS:
        raise DensityFails(
            f"positive side: {rep_c.reason} ({rep_c.condition.value})"
        )
    b_sel, b_rest = _strand_for_path(b_part, rep_b.path or ())
    c_sel, c_rest = _strand_for_path(c_part, rep_c.path or ())

    deferred_parts: List[PartStream] = list(b_rest) + list(c_rest)
    if extras is not None:
        deferred_parts.extend(extras)
    limit = ExtendedReal(target)

    def deferred_emissions():
        iters = [p.emissions() for p in deferred_parts]
        # round-robin so every leftover strand is drained
        while iters:
            alive = []
            for it in iters:
                item = next(it, None)
                if item is not None:
                    yield item
                    alive.append(it)
            iters = alive

    def factory():
        gate = _InsertionGate(limit)
        avg = RunningAverage()
        b_it = b_sel.emissions()
        c_it = c_sel.emissions()
        pending = None
        deferred_it = deferred_emissions()

        def flush():
            nonlocal pending
            while True:
                if pending is None:
                    pending = next(deferred_it, None)
                if pending is None or not gate.admits(avg, pending[1]):
                    return
                src, value = pending
                pending = None
                gate.consumed()
                avg.add(value)
                yield src, value, "extra"

        while True:
            # climb with +inf-side elements until the average reaches target
            first = True
            while first or avg.cmp(target) < 0:
                first = False
                yield from flush()
                src, value = next(c_it)
                avg.add(value)
                yield src, value, "high"
            # descend with -inf-side elements until it returns to target
            first = True
            while first or avg.cmp(target) > 0:
                first = False
                yield from flush()
                src, value = next(b_it)
                avg.add(value)
                yield src, value, "low"

    return Rearrangement(
        source=None,
        factory=factory,
        coverage_bound=observed_coverage_bound(factory),
        name=f"two_sided_balance[{target}]",
        limit_in_average=limit,
        meta={"target": target},
    )


def two_sided_from_spec(spec: SequenceSpec, target) -> Rearrangement:
    """Convenience: decompose a spec with liminf -inf / limsup +inf and steer."""
    prof = profile(spec)
    if prof.liminf != NEG_INF or prof.limsup != POS_INF:
        raise DensityFails("spec must have liminf -inf and limsup +inf")
    dec = decompose(spec, prof)
    b_part = PartStream.from_decomposition(dec, "b")
    c_part = PartStream.from_decomposition(dec, "c")
    d_part = PartStream.from_decomposition(dec, "d")
    extras = [d_part] if d_part is not None else None
    r = two_sided_balance(b_part, c_part, target, extras=extras)
    r.source = spec
    return r


# ---------------------------------------------------------------------------
# Target dispatch over arbitrary specs (CLI entry point)


def part_core(part: PartStream, source: SequenceSpec) -> Rearrangement:
    """A rearrangement that plays one part in its own order.

    Not surjective on its own (it covers only the part's source indices),
    so it carries no usable coverage bound; it exists to serve as the core
    of a limit-preserving merge that restores full coverage.
    """

    def factory():
        for src, v in part.emissions():
            yield src, v, "core"

    def no_bound(_n: int) -> int:
        raise NotDivergent("a lone part is not surjective; merge it first")

    return Rearrangement(
        source=source,
        factory=factory,
        coverage_bound=no_bound,
        name="part_core",
        limit_in_average=part.limit,
    )


def mirror_rearrangement(r: Rearrangement, source: SequenceSpec) -> Rearrangement:
    """Same index order, negated values: averages flip sign exactly."""

    def factory():
        for src, v, tag in r.tagged_stream():
            yield src, -v, tag

    lim = None if r.limit_in_average is None else -r.limit_in_average
    return Rearrangement(
        source=source,
        factory=factory,
        coverage_bound=r.coverage_bound,
        name=f"mirror({r.name})",
        limit_in_average=lim,
        meta={"mirrored": True},
    )


def _negated_part(part: PartStream) -> PartStream:
    return PartStream(negated_spec(part.spec), part.witness, -part.limit)


def construct_target(spec: SequenceSpec, target) -> Rearrangement:
    """Rearrange any supported spec so its average tends to the target.

    Routes by profile shape: bounded specs weight-merge their extreme
    strands; specs divergent on both sides alternate greedily; specs with
    one divergent side place the divergent elements at vanishing density
    (position ~ value/(target - limit)), mirrored when the divergence is
    downward.
    """
    t = as_fraction(target)
    prof = profile(spec)
    if prof.liminf.is_finite and prof.limsup.is_finite:
        return bounded_target(spec, t)
    if prof.liminf == NEG_INF and prof.limsup == POS_INF:
        return two_sided_from_spec(spec, t)

    dec = decompose(spec, prof)
    d_part = PartStream.from_decomposition(dec, "d")
    if prof.limsup == POS_INF:
        b_ps = PartStream.from_decomposition(dec, "b")
        c_ps = PartStream.from_decomposition(dec, "c")
        flip = False
    else:
        # Downward divergence: solve the flipped problem, then negate.
        b_ps = _negated_part(PartStream.from_decomposition(dec, "c"))
        c_ps = _negated_part(PartStream.from_decomposition(dec, "b"))
        t = -t
        flip = True

    b_lim = b_ps.limit.value
    if t > b_lim:
        r = target_above_limsup(b_ps, c_ps, t)
    elif t == b_lim:
        core = part_core(b_ps, spec)
        r = merge_preserving(core, c_ps)
        r.name = f"at_limit[{t}]"
    else:
        lo = f"[{-b_lim}, +inf)" if flip else f"[{b_lim}, +inf)"
        raise TargetUnreachable(
            f"target {target} outside the attainable range "
            + (f"(-inf, {-b_lim}]" if flip else lo)
        )
    if d_part is not None:
        d_use = _negated_part(d_part) if flip else d_part
        r = merge_preserving(r, d_use)
    if flip:
        r = mirror_rearrangement(r, spec)
        r.meta["target"] = -t
    r.source = spec
    return r
