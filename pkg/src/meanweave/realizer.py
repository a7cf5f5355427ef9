"""Realize a prescribed accumulation set of running averages.

Given four strands — values near a finite level a, values near a finite
level b > a, values diverging to -inf and values diverging to +inf — this
module builds a rearrangement whose running average visits shrinking tubes
around a dense schedule of targets drawn from a prescribed closed set
Z inside [a, b], and spikes through arbitrarily large positive and negative
values between visits.  The accumulation points of the average are then
exactly Z together with -inf and +inf.

The stream alternates three regimes:

* steering: inside the current tube (t - 1/k, t + 1/k) the average is held
  by choosing sides (values near b raise it, values near a lower it), while
  the globally oldest unemitted source element is spliced in whenever the
  exact post-splice average stays safely inside the tube;
* jump: after dwelling long enough, one large element of the divergent
  strand for the current direction is emitted at an exactly chosen position
  P, making the average leave the band around [a, b];
* descent: steering resumes until the average re-enters the next tube,
  and the excursion is recorded as an honest wide schedule window.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .aarset import AARSet, Interval
from .errors import (
    MalformedDescriptor,
    MissingInfinity,
    ZOutsideRange,
)
from .extreal import NEG_INF, POS_INF, ExtendedReal, as_fraction
from .rearrange import (
    PartStream,
    Rearrangement,
    RunningAverage,
    observed_coverage_bound,
)
from .seqspec import (
    Constant,
    SequenceSpec,
    _fold_group,
    _leaves,
    _push_pointwise,
    profile,
)

__all__ = [
    "ScheduleEntry",
    "TubeSchedule",
    "accumulation_realizer",
    "realizer_from_spec",
    "dense_targets",
]


# ---------------------------------------------------------------------------
# Tube schedule


@dataclass(frozen=True)
class ScheduleEntry:
    """One verification window: averages in [from_index, next from) lie in (lo, hi)."""

    lo: Fraction
    hi: Fraction
    from_index: int
    kind: str  # "transit" or "tube"
    stage: int
    target: Optional[Fraction] = None


class TubeSchedule:
    """Strictly increasing verification windows, populated as the stream runs.

    Restarting the (deterministic) stream re-records identical entries, so
    recording is idempotent.
    """

    def __init__(self):
        self.entries: List[ScheduleEntry] = []

    def record(self, index: int, entry: ScheduleEntry):
        if index < len(self.entries):
            return  # deterministic replay
        if index != len(self.entries):
            raise AssertionError("schedule entries recorded out of order")
        if self.entries and entry.from_index <= self.entries[-1].from_index:
            raise AssertionError("schedule from-indices must increase")
        self.entries.append(entry)

    def tube_entries(self) -> List[ScheduleEntry]:
        return [e for e in self.entries if e.kind == "tube"]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


# ---------------------------------------------------------------------------
# Dense target enumeration


def _normalize_zset(zset, lo: Fraction, hi: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """Validate Z as a finite union of rational points/intervals in [lo, hi]."""
    pieces: List[Tuple[Fraction, Fraction]] = []
    if isinstance(zset, AARSet):
        items: Iterable = zset.intervals
    else:
        items = zset
    for item in items:
        if isinstance(item, Interval):
            if not (item.lo.is_finite and item.hi.is_finite):
                raise ZOutsideRange("prescribed set must avoid infinities")
            p_lo, p_hi = item.lo.value, item.hi.value
        elif isinstance(item, tuple):
            p_lo, p_hi = as_fraction(item[0]), as_fraction(item[1])
        else:
            p_lo = p_hi = as_fraction(item)
        if p_lo > p_hi:
            raise ZOutsideRange(f"empty piece [{p_lo}, {p_hi}]")
        if p_lo < lo or p_hi > hi:
            raise ZOutsideRange(
                f"piece [{p_lo}, {p_hi}] leaves the steering band [{lo}, {hi}]"
            )
        pieces.append((p_lo, p_hi))
    if not pieces:
        raise ZOutsideRange("prescribed set must be nonempty")
    return pieces


def dense_targets(pieces: Sequence[Tuple[Fraction, Fraction]]) -> Iterator[Fraction]:
    """Enumerate a dense ordered subset of the pieces.

    Points come first (in the given order); intervals contribute the dyadic
    grid k/2^j, by increasing level j and, within a level, by increasing
    magnitude.  Each value is yielded once.
    """
    seen = set()
    for p_lo, p_hi in pieces:
        if p_lo == p_hi and p_lo not in seen:
            seen.add(p_lo)
            yield p_lo
    intervals = [(p_lo, p_hi) for p_lo, p_hi in pieces if p_lo < p_hi]
    if not intervals:
        return
    j = 0
    while True:
        level: List[Fraction] = []
        step = Fraction(1, 1 << j)
        for p_lo, p_hi in intervals:
            k = math.ceil(p_lo / step)
            while k * step <= p_hi:
                x = k * step
                if x not in seen:
                    seen.add(x)
                    level.append(x)
                k += 1
        level.sort(key=lambda x: (abs(x), x))
        yield from level
        j += 1


class _TargetSchedule:
    """Triangular revisiting pattern over the dense target list.

    Stage targets follow w1; w1, w2; w1, w2, w3; ... so every enumerated
    value is revisited infinitely often.
    """

    def __init__(self, pieces):
        self._gen = dense_targets(pieces)
        self._known: List[Fraction] = []
        self._exhausted = False
        self._block = 1
        self._offset = 0

    def _ensure(self, count: int):
        while not self._exhausted and len(self._known) < count:
            nxt = next(self._gen, None)
            if nxt is None:
                self._exhausted = True
            else:
                self._known.append(nxt)

    def next_target(self) -> Fraction:
        self._offset += 1
        self._ensure(self._offset)
        width = min(self._block, len(self._known))
        if self._offset > width:
            self._block += 1
            self._offset = 1
        return self._known[self._offset - 1]


# ---------------------------------------------------------------------------
# Cursors over part emissions


class _Cursor:
    """Peekable (source_index, value) stream head."""

    __slots__ = ("_it", "head")

    def __init__(self, part: Optional[PartStream]):
        self._it = part.emissions() if part is not None else iter(())
        self.head = next(self._it, None)

    def advance(self):
        item = self.head
        self.head = next(self._it, None)
        return item


def _ceil_div_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


# ---------------------------------------------------------------------------
# The realizer


def accumulation_realizer(
    b_part: PartStream,
    c_part: PartStream,
    d_part: PartStream,
    e_part: PartStream,
    zset,
    extras: Sequence[PartStream] = (),
) -> Rearrangement:
    """Rearrange four strands so the averages accumulate exactly at Z ∪ {-inf, +inf}.

    b_part must converge to a finite a, c_part to a finite b > a, d_part must
    tend to -inf and e_part to +inf; Z is a finite union of rational points
    and closed intervals inside [a, b].  Extra convergent strands (limits
    inside (a, b)) may ride along; they are consumed through the splice pool.
    """
    if not (b_part.limit is not None and b_part.limit.is_finite):
        raise MalformedDescriptor("low steering strand must have a finite limit")
    if not (c_part.limit is not None and c_part.limit.is_finite):
        raise MalformedDescriptor("high steering strand must have a finite limit")
    a = b_part.limit.value
    b_val = c_part.limit.value
    if a >= b_val:
        raise MalformedDescriptor(
            f"steering needs distinct finite levels, got {a} and {b_val}"
        )
    if d_part is None or d_part.limit != NEG_INF:
        raise MissingInfinity("need a strand tending to -inf for downward jumps")
    if e_part is None or e_part.limit != POS_INF:
        raise MissingInfinity("need a strand tending to +inf for upward jumps")
    pieces = _normalize_zset(zset, a, b_val)

    k_bound = max(abs(a - 1), abs(b_val + 1))  # bound on in-band values
    span1 = b_val - a + 1
    schedule = TubeSchedule()

    def n_min(stage: int) -> int:
        # positions this large keep in-band steps below an eighth tube width
        return _ceil_div_frac(16 * k_bound * Fraction(stage))

    band_lo = a - 1
    band_hi = b_val + 1
    midpoint = (a + b_val) / 2

    def tube_bounds(tgt: Fraction, w: Fraction) -> Tuple[Fraction, Fraction]:
        # tube intersected with the steering band
        return max(tgt - w, band_lo), min(tgt + w, band_hi)

    # constant steering strands admit exact batch runs during descents
    b_const = b_part.spec.value if isinstance(b_part.spec, Constant) else None
    c_const = c_part.spec.value if isinstance(c_part.spec, Constant) else None

    def factory():
        targets = _TargetSchedule(pieces)
        b_cur = _Cursor(b_part)
        c_cur = _Cursor(c_part)
        d_cur = _Cursor(d_part)
        e_cur = _Cursor(e_part)
        extra_curs = [_Cursor(p) for p in extras]
        b_backlog: deque = deque()
        c_backlog: deque = deque()
        d_pend: deque = deque()
        e_pend: deque = deque()

        avg = RunningAverage()
        stage = 0  # completed tube entries
        target = targets.next_target()
        pending_target: Optional[Fraction] = None
        width = Fraction(1, 1)
        t_lo, t_hi = tube_bounds(target, width)
        margin = width / 8
        s_lo, s_hi = t_lo + margin, t_hi - margin
        entry_index = 0  # schedule entries recorded
        window_start = 1
        # observed average range of the open window, as raw num/den pairs
        wmin: Optional[Tuple[int, int]] = None
        wmax: Optional[Tuple[int, int]] = None

        state = "descent"  # descending/steering toward the next tube
        dwell_end = 0
        jump_at = 0
        jump_item: Optional[Tuple[int, Fraction]] = None
        up_minus_down = 0  # fairness: both infinities must keep accumulating

        def emit(src, value, tag):
            nonlocal wmin, wmax
            avg.add(value)
            cn, cd = avg.num, avg.den * avg.n
            if wmin is None:
                wmin = wmax = (cn, cd)
            elif cn * wmin[1] < wmin[0] * cd:
                wmin = (cn, cd)
            elif cn * wmax[1] > wmax[0] * cd:
                wmax = (cn, cd)
            return src, value, tag

        def retarget(tgt: Fraction, w: Fraction):
            nonlocal target, width, t_lo, t_hi, s_lo, s_hi
            target = tgt
            width = w
            t_lo, t_hi = tube_bounds(tgt, w)
            m = w / 8
            s_lo, s_hi = t_lo + m, t_hi - m

        def in_band_head(side_cur):
            """Divert early far-from-limit values; return an in-band head."""
            if side_cur is b_cur:
                backlog, limit_value = b_backlog, a
            else:
                backlog, limit_value = c_backlog, b_val
            while True:
                head = side_cur.head
                if head is None:
                    raise AssertionError("steering strand exhausted")
                if abs(head[1] - limit_value) < 1:
                    return head
                backlog.append(side_cur.advance())

        def steer():
            """One steering emission toward the current target."""
            if avg.n == 0:
                side = c_cur if target >= midpoint else b_cur
            else:
                side = c_cur if avg.cmp(target) <= 0 else b_cur
            src, value = in_band_head(side)
            side.advance()
            return emit(src, value, "steer")

        def oldest_candidate():
            """(src, value, queue_or_cursor) of the oldest unemitted element."""
            best_src = None
            best_value = None
            best_take = None
            for head, take in (
                (b_cur.head, b_cur),
                (c_cur.head, c_cur),
                (d_pend[0] if d_pend else d_cur.head,
                 d_pend if d_pend else d_cur),
                (e_pend[0] if e_pend else e_cur.head,
                 e_pend if e_pend else e_cur),
                (b_backlog[0] if b_backlog else None, b_backlog),
                (c_backlog[0] if c_backlog else None, c_backlog),
            ):
                if head is not None and (best_src is None or head[0] < best_src):
                    best_src, best_value, best_take = head[0], head[1], take
            for cur in extra_curs:
                head = cur.head
                if head is not None and (best_src is None or head[0] < best_src):
                    best_src, best_value, best_take = head[0], head[1], cur
            return best_src, best_value, best_take

        def select_jump(direction: int):
            """First divergent element admitting an exact landing position P."""
            n_now = avg.n
            h = Fraction(1, stage + 1)  # next tube half-width
            m_floor = max(
                n_now,
                _ceil_div_frac(9 * k_bound / h),
                _ceil_div_frac(18 * span1 / h),
            )
            cur, pend = (e_cur, e_pend) if direction > 0 else (d_cur, d_pend)
            while True:
                head = cur.head
                if head is None:
                    raise MissingInfinity("divergent strand exhausted")
                magnitude = abs(head[1])
                if magnitude > 1:
                    p_low = max(
                        m_floor + 1,
                        math.isqrt(_ceil_div_frac(9 * magnitude / h)) + 1,
                    )
                    if span1 * p_low < magnitude:
                        return cur.advance(), p_low
                pend.append(cur.advance())

        def record_window(kind: str, next_from: int, lo: Fraction, hi: Fraction,
                          tgt: Optional[Fraction]):
            nonlocal entry_index, window_start, wmin, wmax
            schedule.record(
                entry_index,
                ScheduleEntry(lo, hi, window_start, kind, stage, tgt),
            )
            entry_index += 1
            window_start = next_from
            wmin = None
            wmax = None

        while True:
            if state == "tube":
                n = avg.n
                if n >= dwell_end:
                    # choose the jump direction so the excursion re-enters the
                    # next tube cheaply (descents by low values reach high
                    # tubes fast and vice versa), but never let either
                    # infinity starve
                    pending_target = targets.next_target()
                    want_up = pending_target >= midpoint
                    if want_up and up_minus_down >= 3:
                        want_up = False
                    elif not want_up and up_minus_down <= -3:
                        want_up = True
                    up_minus_down += 1 if want_up else -1
                    jump_item, jump_at = select_jump(1 if want_up else -1)
                    state = "prejump"
                    continue
                cand_src, cand_value, cand_take = oldest_candidate()
                if cand_src is not None and avg.post_within(cand_value, s_lo, s_hi):
                    if isinstance(cand_take, _Cursor):
                        src, value = cand_take.advance()
                    else:
                        src, value = cand_take.popleft()
                    yield emit(src, value, "splice")
                    continue
                yield steer()

            elif state == "prejump":
                if avg.n + 1 < jump_at:
                    yield steer()
                    continue
                src, value = jump_item
                jump_item = None
                # the tube window ends just before the jump position
                record_window("tube", avg.n + 1, t_lo, t_hi, target)
                retarget(pending_target, Fraction(1, stage + 1))
                yield emit(src, value, "jump")
                state = "descent"

            else:  # descent / initial approach
                n = avg.n
                if n >= n_min(stage + 1) and n > 0 and avg.within(s_lo, s_hi):
                    stage += 1
                    record_window(
                        "transit", n + 1,
                        Fraction(*wmin) - 1, Fraction(*wmax) + 1, None,
                    )
                    dwell_end = max(n + max(8, n >> 4), n_min(stage + 1))
                    state = "tube"
                    continue
                # long monotone approaches emit in exact batches: the number
                # of constant-value steps before the shrunken edge is crossed
                # is a single rational calculation
                if b_const is not None and c_const is not None and n > 0:
                    run = 0
                    s_now = Fraction(avg.num, avg.den)
                    if avg.cmp(target) > 0 and avg.cmp(s_hi) > 0 and b_const < s_hi:
                        side = b_cur
                        run = _ceil_div_frac(
                            (s_now - s_hi * n) / (s_hi - b_const)
                        ) - 1
                    elif avg.cmp(target) < 0 and avg.cmp(s_lo) < 0 and c_const > s_lo:
                        side = c_cur
                        run = _ceil_div_frac(
                            (s_lo * n - s_now) / (c_const - s_lo)
                        ) - 1
                    if run > 0:
                        advance = side.advance
                        add = avg.add
                        for _ in range(run):
                            src, value = advance()
                            add(value)
                            yield src, value, "steer"
                        cn, cd = avg.num, avg.den * avg.n
                        if wmin is None:
                            wmin = wmax = (cn, cd)
                        else:
                            if cn * wmin[1] < wmin[0] * cd:
                                wmin = (cn, cd)
                            if cn * wmax[1] > wmax[0] * cd:
                                wmax = (cn, cd)
                        continue
                yield steer()

    name = "accumulation_realizer"
    rearr = Rearrangement(
        source=None,
        factory=factory,
        coverage_bound=observed_coverage_bound(factory),
        name=name,
        limit_in_average=None,
        meta={
            "schedule": schedule,
            "low": a,
            "high": b_val,
            "pieces": pieces,
        },
    )
    return rearr


# ---------------------------------------------------------------------------
# Building the four strands from a single spec


def realizer_from_spec(spec: SequenceSpec, zset) -> Rearrangement:
    """Group a spec's strands by limit and realize Z over them.

    The strand limits must include two distinct finite levels (the smallest
    and largest finite accumulation points frame the steering band) and both
    infinities.
    """
    normalized = _push_pointwise(spec)
    leaf_list = []
    for leaf_spec, index_map in _leaves(normalized, lambda k: k):
        limit = profile(leaf_spec).converges_to()
        if limit is None:
            raise MalformedDescriptor("every strand must converge for realizing")
        leaf_list.append((leaf_spec, index_map, limit))

    finite_limits = sorted({lim.value for _s, _w, lim in leaf_list if lim.is_finite})
    if len(finite_limits) < 2:
        raise MalformedDescriptor(
            "need two distinct finite strand limits to steer between"
        )
    a, b_val = finite_limits[0], finite_limits[-1]

    def fold(matching) -> Optional[PartStream]:
        group = [(s, w) for s, w, lim in leaf_list if matching(lim)]
        if not group:
            return None
        folded_spec, folded_w = _fold_group(group)
        return PartStream(folded_spec, folded_w, None)

    low = fold(lambda lim: lim.is_finite and lim.value == a)
    high = fold(lambda lim: lim.is_finite and lim.value == b_val)
    down = fold(lambda lim: lim == NEG_INF)
    up = fold(lambda lim: lim == POS_INF)
    if down is None:
        raise MissingInfinity("no strand tends to -inf")
    if up is None:
        raise MissingInfinity("no strand tends to +inf")
    middle = fold(
        lambda lim: lim.is_finite and a < lim.value < b_val
    )

    low = PartStream(low.spec, low.witness, ExtendedReal(a))
    high = PartStream(high.spec, high.witness, ExtendedReal(b_val))
    down = PartStream(down.spec, down.witness, NEG_INF)
    up = PartStream(up.spec, up.witness, POS_INF)
    extras = [middle] if middle is not None else []

    r = accumulation_realizer(low, high, down, up, zset, extras=extras)
    r.source = spec
    return r
