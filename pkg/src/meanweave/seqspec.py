"""Declarative sequence descriptors with analytic metadata.

A ``SequenceSpec`` describes an infinite rational sequence by structure
(constant, power, geometric, run-length blocks, interleavings, pointwise
maps...) rather than by samples.  Every spec can evaluate any term exactly,
and carries enough structure that accumulation behaviour (its *profile*) is
derived symbolically — never estimated from numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from fractions import Fraction
from typing import Callable, Iterator, Optional, Tuple

from .aarset import Interval, _canonicalize
from .errors import MalformedDescriptor, UnknownProfile
from .extreal import NEG_INF, POS_INF, ExtendedReal, Rational, as_fraction


# ---------------------------------------------------------------------------
# Accumulation profiles


@dataclass(frozen=True)
class AccumulationProfile:
    """Declared set of accumulation points of a sequence.

    ``finite_acc`` holds the closed intervals / points of accumulation;
    endpoints may be infinite for profiles whose finite accumulation set is
    unbounded, in which case the matching infinity flag must also be set.
    """

    finite_acc: Tuple[Interval, ...]
    has_neg_inf: bool = False
    has_pos_inf: bool = False
    parts: Optional["Decomposition"] = None

    def __post_init__(self):
        ivs = _canonicalize(self.finite_acc)
        object.__setattr__(self, "finite_acc", ivs)
        if not ivs and not (self.has_neg_inf or self.has_pos_inf):
            raise ValueError("a profile needs at least one accumulation point")
        for iv in ivs:
            if iv.lo == NEG_INF and not self.has_neg_inf:
                raise ValueError("unbounded-below finite_acc requires has_neg_inf")
            if iv.hi == POS_INF and not self.has_pos_inf:
                raise ValueError("unbounded-above finite_acc requires has_pos_inf")

    @staticmethod
    def of_points(*points, neg_inf: bool = False, pos_inf: bool = False):
        return AccumulationProfile(
            tuple(Interval.point(p) for p in points),
            has_neg_inf=neg_inf,
            has_pos_inf=pos_inf,
        )

    @property
    def liminf(self) -> ExtendedReal:
        if self.has_neg_inf:
            return NEG_INF
        if self.finite_acc:
            return self.finite_acc[0].lo
        return POS_INF

    @property
    def limsup(self) -> ExtendedReal:
        if self.has_pos_inf:
            return POS_INF
        if self.finite_acc:
            return self.finite_acc[-1].hi
        return NEG_INF

    def converges_to(self) -> Optional[ExtendedReal]:
        """The single accumulation point, or None if there are several."""
        if self.has_neg_inf:
            if not self.has_pos_inf and not self.finite_acc:
                return NEG_INF
            return None
        if self.has_pos_inf:
            if not self.finite_acc:
                return POS_INF
            return None
        if len(self.finite_acc) == 1 and self.finite_acc[0].is_point:
            return self.finite_acc[0].lo
        return None

    # -- transforms used by structural profile derivation ------------------

    def negate(self) -> "AccumulationProfile":
        ivs = tuple(Interval(-iv.hi, -iv.lo) for iv in self.finite_acc)
        return AccumulationProfile(ivs, self.has_pos_inf, self.has_neg_inf)

    def affine(self, scale: Fraction, shift: Fraction) -> "AccumulationProfile":
        if scale == 0:
            return AccumulationProfile.of_points(shift)
        if scale < 0:
            return self.negate().affine(-scale, shift)

        def mv(p: ExtendedReal) -> ExtendedReal:
            return p if not p.is_finite else ExtendedReal(scale * p.value + shift)

        ivs = tuple(Interval(mv(iv.lo), mv(iv.hi)) for iv in self.finite_acc)
        return AccumulationProfile(ivs, self.has_neg_inf, self.has_pos_inf)

    def square(self) -> "AccumulationProfile":
        def sq(p: ExtendedReal) -> ExtendedReal:
            return POS_INF if not p.is_finite else ExtendedReal(p.value * p.value)

        ivs = []
        for iv in self.finite_acc:
            if iv.lo >= 0:
                ivs.append(Interval(sq(iv.lo), sq(iv.hi)))
            elif iv.hi <= 0:
                ivs.append(Interval(sq(iv.hi), sq(iv.lo)))
            else:
                hi = max(sq(iv.lo), sq(iv.hi))
                ivs.append(Interval(ExtendedReal(0), hi))
        return AccumulationProfile(
            tuple(ivs), False, self.has_neg_inf or self.has_pos_inf
        )

    def union(self, other: "AccumulationProfile") -> "AccumulationProfile":
        return AccumulationProfile(
            self.finite_acc + other.finite_acc,
            self.has_neg_inf or other.has_neg_inf,
            self.has_pos_inf or other.has_pos_inf,
        )


# ---------------------------------------------------------------------------
# Sequence descriptors


@dataclass(frozen=True)
class SequenceSpec:
    """Base class; concrete generators subclass this.

    ``declared_profile`` lets callers assert accumulation behaviour the
    structural rules cannot see; it takes precedence in ``profile()``.
    """

    declared_profile: Optional[AccumulationProfile] = field(
        default=None, kw_only=True
    )

    def term(self, n: int) -> Fraction:
        raise NotImplementedError

    def iter_terms(self) -> Iterator[Fraction]:
        """Terms from index 1; overridden where incremental state helps."""
        n = 1
        while True:
            yield self.term(n)
            n += 1

    def _check_index(self, n: int):
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"term index must be a positive integer, got {n!r}")


@dataclass(frozen=True)
class Constant(SequenceSpec):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", as_fraction(self.value))

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return self.value


@dataclass(frozen=True)
class PowerOfIndex(SequenceSpec):
    """n^k for a fixed positive integer exponent k."""

    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 1:
            raise MalformedDescriptor(
                f"power exponent must be a positive integer, got {self.exponent!r}"
            )

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return Fraction(n**self.exponent)


@dataclass(frozen=True)
class Geometric(SequenceSpec):
    """ratio^n with rational ratio > 1."""

    ratio: Fraction

    def __post_init__(self):
        r = as_fraction(self.ratio)
        if r <= 1:
            raise MalformedDescriptor(f"geometric ratio must exceed 1, got {r}")
        object.__setattr__(self, "ratio", r)

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return self.ratio**n

    def iter_terms(self) -> Iterator[Fraction]:
        value = self.ratio
        while True:
            yield value
            value *= self.ratio


@dataclass(frozen=True)
class Linear(SequenceSpec):
    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return Fraction(n)


@dataclass(frozen=True)
class NegLinear(SequenceSpec):
    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return Fraction(-n)


class RunRule(IntEnum):
    """Catalog of run-length block families.

    DOUBLING: k+1 copies of 2^k (k >= 0): 1, 2,2, 4,4,4, 8,8,8,8, ...
    STAIRS: v+1 copies of v (v >= 1): 1,1, 2,2,2, 3,3,3,3, ...
    FACTORIAL: (v+1)^2 copies of v! (v >= 1): four 1s, nine 2s, ...
    CEIL_SQRT: 2k-1 copies of k, i.e. term n is ceil(sqrt(n)).
    """

    DOUBLING = 1
    STAIRS = 2
    FACTORIAL = 3
    CEIL_SQRT = 4


@dataclass(frozen=True)
class RunLength(SequenceSpec):
    rule: RunRule

    def __post_init__(self):
        try:
            object.__setattr__(self, "rule", RunRule(self.rule))
        except ValueError:
            raise MalformedDescriptor(
                f"unknown run-length rule {self.rule!r}"
            ) from None

    def _block(self, b: int) -> Tuple[Fraction, int]:
        """Value and multiplicity of the b-th block (b >= 1)."""
        if self.rule is RunRule.DOUBLING:
            return Fraction(2 ** (b - 1)), b
        if self.rule is RunRule.STAIRS:
            return Fraction(b), b + 1
        if self.rule is RunRule.FACTORIAL:
            return Fraction(math.factorial(b)), (b + 1) ** 2
        return Fraction(b), 2 * b - 1  # CEIL_SQRT

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        if self.rule is RunRule.CEIL_SQRT:
            return Fraction(math.isqrt(n - 1) + 1)
        if self.rule is RunRule.DOUBLING:
            # blocks of sizes 1, 2, 3, ...; cumulative m(m+1)/2
            m = (math.isqrt(8 * n + 1) - 1) // 2
            if m * (m + 1) // 2 < n:
                m += 1
            return Fraction(2 ** (m - 1))
        if self.rule is RunRule.STAIRS:
            # cumulative count through value v is v(v+3)/2
            v = max(1, (math.isqrt(8 * n + 9) - 3) // 2)
            while v * (v + 3) // 2 < n:
                v += 1
            return Fraction(v)
        # FACTORIAL: cumulative count through v is (v+1)(v+2)(2v+3)/6 - 1
        v = max(1, round((3 * n) ** (1 / 3)) - 2)
        while (v + 1) * (v + 2) * (2 * v + 3) // 6 - 1 < n:
            v += 1
        while v > 1 and v * (v + 1) * (2 * v + 1) // 6 - 1 >= n:
            v -= 1
        return Fraction(math.factorial(v))

    def iter_terms(self) -> Iterator[Fraction]:
        b = 1
        while True:
            value, mult = self._block(b)
            for _ in range(mult):
                yield value
            b += 1


@dataclass(frozen=True)
class SumJump(SequenceSpec):
    """Step-by-one growth that jumps past its own prefix sum.

    At indices that are powers of two the term is 1 + (sum of all earlier
    terms); elsewhere it is the previous term plus one.  Divergent and
    increasing, but the term/prefix-sum ratio exceeds 1 infinitely often.
    """

    _values: list = field(default_factory=list, compare=False, repr=False)
    _sums: list = field(default_factory=list, compare=False, repr=False)

    def _extend_to(self, n: int):
        vals, sums = self._values, self._sums
        if not vals:
            vals.append(Fraction(1))
            sums.append(Fraction(1))
        while len(vals) < n:
            i = len(vals) + 1  # 1-based index of the next term
            if i & (i - 1) == 0:  # power of two
                v = 1 + sums[-1]
            else:
                v = vals[-1] + 1
            vals.append(v)
            sums.append(sums[-1] + v)

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        self._extend_to(n)
        return self._values[n - 1]

    def iter_terms(self) -> Iterator[Fraction]:
        n = 1
        while True:
            self._extend_to(n)
            yield self._values[n - 1]
            n += 1


@dataclass(frozen=True)
class ExplicitPrefix(SequenceSpec):
    """Finitely many explicit values followed by a tail spec (re-indexed)."""

    values: Tuple[Fraction, ...]
    tail: SequenceSpec

    def __post_init__(self):
        object.__setattr__(
            self, "values", tuple(as_fraction(v) for v in self.values)
        )

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        if n <= len(self.values):
            return self.values[n - 1]
        return self.tail.term(n - len(self.values))

    def iter_terms(self) -> Iterator[Fraction]:
        yield from self.values
        yield from self.tail.iter_terms()


@dataclass(frozen=True)
class Affine(SequenceSpec):
    """scale * base_term + shift, pointwise."""

    base: SequenceSpec
    scale: Fraction
    shift: Fraction

    def __post_init__(self):
        object.__setattr__(self, "scale", as_fraction(self.scale))
        object.__setattr__(self, "shift", as_fraction(self.shift))

    def term(self, n: int) -> Fraction:
        return self.scale * self.base.term(n) + self.shift

    def iter_terms(self) -> Iterator[Fraction]:
        for v in self.base.iter_terms():
            yield self.scale * v + self.shift


@dataclass(frozen=True)
class PointwiseSquare(SequenceSpec):
    base: SequenceSpec

    def term(self, n: int) -> Fraction:
        v = self.base.term(n)
        return v * v

    def iter_terms(self) -> Iterator[Fraction]:
        for v in self.base.iter_terms():
            yield v * v


@dataclass(frozen=True)
class Negate(SequenceSpec):
    base: SequenceSpec

    def term(self, n: int) -> Fraction:
        return -self.base.term(n)

    def iter_terms(self) -> Iterator[Fraction]:
        for v in self.base.iter_terms():
            yield -v


@dataclass(frozen=True)
class Interleave(SequenceSpec):
    """Strict alternation: term 2n-1 comes from ``first``, term 2n from ``second``."""

    first: SequenceSpec
    second: SequenceSpec

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        if n % 2:
            return self.first.term((n + 1) // 2)
        return self.second.term(n // 2)

    def iter_terms(self) -> Iterator[Fraction]:
        a, b = self.first.iter_terms(), self.second.iter_terms()
        while True:
            yield next(a)
            yield next(b)


@dataclass(frozen=True)
class PointwiseSum(SequenceSpec):
    """Index-aligned sum of two specs."""

    first: SequenceSpec
    second: SequenceSpec

    def term(self, n: int) -> Fraction:
        return self.first.term(n) + self.second.term(n)

    def iter_terms(self) -> Iterator[Fraction]:
        for u, v in zip(self.first.iter_terms(), self.second.iter_terms()):
            yield u + v


# ---------------------------------------------------------------------------
# Construction helpers


def eval_term(spec: SequenceSpec, n: int) -> Fraction:
    """The n-th term (n >= 1) as an exact rational."""
    return spec.term(n)


def negated_spec(spec: SequenceSpec) -> SequenceSpec:
    """Pointwise negation, simplified structurally where possible.

    Keeping the result inside the named spec families (instead of a blanket
    Negate wrapper) lets the analytic profile/balance rules recognize it.
    """
    if isinstance(spec, Negate):
        return spec.base
    if isinstance(spec, Constant):
        return Constant(-spec.value)
    if isinstance(spec, Linear):
        return NegLinear()
    if isinstance(spec, NegLinear):
        return Linear()
    if isinstance(spec, Affine):
        return Affine(spec.base, -spec.scale, -spec.shift)
    if isinstance(spec, Interleave):
        return Interleave(negated_spec(spec.first), negated_spec(spec.second))
    if isinstance(spec, ExplicitPrefix):
        return ExplicitPrefix(
            tuple(-v for v in spec.values), negated_spec(spec.tail)
        )
    return Negate(spec)


def run_table(pairs, tail: SequenceSpec) -> SequenceSpec:
    """Expand an explicit (value, multiplicity) table into a prefix spec.

    Multiplicities must be at least 1; a zero or negative multiplicity is a
    malformed descriptor.
    """
    values = []
    for value, mult in pairs:
        if not isinstance(mult, int) or mult < 1:
            raise MalformedDescriptor(
                f"run-length multiplicity must be >= 1, got {mult!r}"
            )
        values.extend([as_fraction(value)] * mult)
    return ExplicitPrefix(tuple(values), tail)


def build_spec(descriptor) -> SequenceSpec:
    """Validate a descriptor and attach its derivable profile.

    Accepts an already-built ``SequenceSpec`` (validated on construction) or
    DSL text.  Returns an equal spec whose ``declared_profile`` is filled in
    whenever the structural rules determine it.
    """
    if isinstance(descriptor, str):
        from .dsl import parse_spec

        descriptor = parse_spec(descriptor)
    if not isinstance(descriptor, SequenceSpec):
        raise MalformedDescriptor(f"not a sequence descriptor: {descriptor!r}")
    if descriptor.declared_profile is not None:
        return descriptor
    try:
        return replace(descriptor, declared_profile=profile(descriptor))
    except UnknownProfile:
        return descriptor


# ---------------------------------------------------------------------------
# Profiles


def profile(spec: SequenceSpec) -> AccumulationProfile:
    """Accumulation profile of a spec, declared or structurally derived.

    Declared profiles win.  Structural rules cover the whole catalog and its
    closures under negate/affine/square/interleave; a pointwise sum is only
    resolved when both sides converge (or diverge compatibly).  Anything else
    raises UnknownProfile — profiles are never inferred from samples.
    """
    if spec.declared_profile is not None:
        return spec.declared_profile
    if isinstance(spec, Constant):
        return AccumulationProfile.of_points(spec.value)
    if isinstance(spec, (PowerOfIndex, Geometric, Linear, RunLength, SumJump)):
        return AccumulationProfile.of_points(pos_inf=True)
    if isinstance(spec, NegLinear):
        return AccumulationProfile.of_points(neg_inf=True)
    if isinstance(spec, ExplicitPrefix):
        return profile(spec.tail)
    if isinstance(spec, Negate):
        return profile(spec.base).negate()
    if isinstance(spec, Affine):
        return profile(spec.base).affine(spec.scale, spec.shift)
    if isinstance(spec, PointwiseSquare):
        return profile(spec.base).square()
    if isinstance(spec, Interleave):
        return profile(spec.first).union(profile(spec.second))
    if isinstance(spec, PointwiseSum):
        u = profile(spec.first).converges_to()
        v = profile(spec.second).converges_to()
        if u is None or v is None:
            raise UnknownProfile(
                "pointwise sum needs both sides convergent in the extended reals"
            )
        if u.is_finite and v.is_finite:
            return AccumulationProfile.of_points(u.value + v.value)
        infinities = {p for p in (u, v) if not p.is_finite}
        if len(infinities) == 1:
            inf = infinities.pop()
            return AccumulationProfile.of_points(pos_inf=inf.is_pos_inf,
                                                 neg_inf=inf.is_neg_inf)
        raise UnknownProfile("sum of opposite infinities is indeterminate")
    raise UnknownProfile(f"no profile rule for {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Decomposition into convergent parts


IndexMap = Callable[[int], int]


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Split of a source spec into convergent interleaved parts.

    ``b_part`` converges (in the extended reals) to the source's liminf and
    ``c_part`` to its limsup; ``d_part`` folds any remaining convergent
    strands.  ``witness(part, k)`` maps the k-th index of a part back to its
    source index; together the witnesses partition the source index set.
    """

    source: SequenceSpec
    b_part: SequenceSpec
    b_limit: ExtendedReal
    c_part: Optional[SequenceSpec]
    c_limit: Optional[ExtendedReal]
    d_part: Optional[SequenceSpec]
    d_limits: Tuple[ExtendedReal, ...]
    _witnesses: dict

    def witness(self, part: str, k: int) -> int:
        """Source index of the k-th element of part 'b', 'c' or 'd'."""
        try:
            w = self._witnesses[part]
        except KeyError:
            raise ValueError(f"no such part: {part!r}") from None
        return w(k)

    def part_spec(self, part: str) -> Optional[SequenceSpec]:
        return {"b": self.b_part, "c": self.c_part, "d": self.d_part}[part]

    def emissions(self, part: str):
        """Lazy (source_index, value) stream of one part, in part order."""
        spec = self.part_spec(part)
        if spec is None:
            return
        w = self._witnesses[part]
        for k, value in enumerate(spec.iter_terms(), start=1):
            yield w(k), value

    @property
    def parts_present(self) -> Tuple[str, ...]:
        out = ["b"]
        if self.c_part is not None:
            out.append("c")
        if self.d_part is not None:
            out.append("d")
        return tuple(out)


def _push_pointwise(spec: SequenceSpec) -> SequenceSpec:
    """Distribute pointwise wrappers over interleaves.

    Negate/Affine/Square act term-by-term, so they commute with the strict
    alternation of Interleave; pushing them inward exposes the convergent
    strands to the leaf walk.
    """
    if isinstance(spec, Negate):
        base = _push_pointwise(spec.base)
        if isinstance(base, Interleave):
            return Interleave(
                _push_pointwise(Negate(base.first)),
                _push_pointwise(Negate(base.second)),
            )
        return Negate(base)
    if isinstance(spec, Affine):
        base = _push_pointwise(spec.base)
        if isinstance(base, Interleave):
            return Interleave(
                _push_pointwise(Affine(base.first, spec.scale, spec.shift)),
                _push_pointwise(Affine(base.second, spec.scale, spec.shift)),
            )
        return Affine(base, spec.scale, spec.shift)
    if isinstance(spec, PointwiseSquare):
        base = _push_pointwise(spec.base)
        if isinstance(base, Interleave):
            return Interleave(
                _push_pointwise(PointwiseSquare(base.first)),
                _push_pointwise(PointwiseSquare(base.second)),
            )
        return PointwiseSquare(base)
    if isinstance(spec, Interleave):
        return Interleave(
            _push_pointwise(spec.first), _push_pointwise(spec.second)
        )
    return spec


def _leaves(spec: SequenceSpec, index_map: IndexMap):
    """All non-interleave strands with their source-index maps."""
    if isinstance(spec, Interleave):
        first_map = _compose(index_map, lambda k: 2 * k - 1)
        second_map = _compose(index_map, lambda k: 2 * k)
        return _leaves(spec.first, first_map) + _leaves(spec.second, second_map)
    return [(spec, index_map)]


def _compose(outer: IndexMap, inner: IndexMap) -> IndexMap:
    return lambda k: outer(inner(k))


def _pair(left, right):
    """Fold two (spec, witness) strands into one interleaved strand."""
    (ls, lw), (rs, rw) = left, right

    def witness(k: int) -> int:
        if k % 2:
            return lw((k + 1) // 2)
        return rw(k // 2)

    return Interleave(ls, rs), witness


def _fold_group(group):
    spec_w = group[0]
    for nxt in group[1:]:
        spec_w = _pair(spec_w, nxt)
    return spec_w


def decompose(
    spec: SequenceSpec, prof: Optional[AccumulationProfile] = None
) -> Decomposition:
    """Split a spec into strands converging to liminf, limsup and the rest.

    Requires every interleaved strand to converge in the extended reals;
    otherwise the split is not structurally available and UnknownProfile is
    raised.
    """
    if prof is None:
        prof = profile(spec)
    if isinstance(spec, ExplicitPrefix):
        if not spec.values:
            return decompose(spec.tail, prof)
        return _decompose_behind_prefix(spec, prof)
    normalized = _push_pointwise(spec)
    leaf_list = []
    for leaf_spec, index_map in _leaves(normalized, lambda k: k):
        limit = profile(leaf_spec).converges_to()
        if limit is None:
            raise UnknownProfile(
                f"strand {type(leaf_spec).__name__} does not converge; "
                "cannot decompose"
            )
        leaf_list.append((leaf_spec, index_map, limit))

    lo, hi = prof.liminf, prof.limsup
    b_group = [(s, w) for s, w, lim in leaf_list if lim == lo]
    if not b_group:
        raise UnknownProfile("no strand attains the declared liminf")
    if hi != lo:
        c_group = [(s, w) for s, w, lim in leaf_list if lim == hi]
        if not c_group:
            raise UnknownProfile("no strand attains the declared limsup")
    else:
        c_group = []
    d_group = [(s, w) for s, w, lim in leaf_list if lim != lo and lim != hi]
    d_limits = tuple(lim for _, _, lim in leaf_list if lim != lo and lim != hi)

    b_spec, b_w = _fold_group(b_group)
    witnesses = {"b": b_w}
    c_spec = c_limit = None
    if c_group:
        c_spec, c_w = _fold_group(c_group)
        c_limit = hi
        witnesses["c"] = c_w
    d_spec = None
    if d_group:
        d_spec, d_w = _fold_group(d_group)
        witnesses["d"] = d_w

    return Decomposition(
        source=spec,
        b_part=b_spec,
        b_limit=lo,
        c_part=c_spec,
        c_limit=c_limit,
        d_part=d_spec,
        d_limits=d_limits,
        _witnesses=witnesses,
    )


def _decompose_behind_prefix(
    spec: ExplicitPrefix, prof: AccumulationProfile
) -> Decomposition:
    """Decompose a finitely-modified spec via its tail.

    The head values join the liminf strand (finitely many values cannot
    change a strand's limit) and every tail witness shifts by the head
    length, so the witnesses still partition the source index set.
    """
    head = len(spec.values)
    inner = decompose(spec.tail)

    def shifted(w: IndexMap) -> IndexMap:
        return lambda k: head + w(k)

    def b_witness(k: int) -> int:
        if k <= head:
            return k
        return head + inner._witnesses["b"](k - head)

    witnesses = {"b": b_witness}
    for part in ("c", "d"):
        if part in inner._witnesses:
            witnesses[part] = shifted(inner._witnesses[part])

    return Decomposition(
        source=spec,
        b_part=ExplicitPrefix(spec.values, inner.b_part),
        b_limit=inner.b_limit,
        c_part=inner.c_part,
        c_limit=inner.c_limit,
        d_part=inner.d_part,
        d_limits=inner.d_limits,
        _witnesses=witnesses,
    )
