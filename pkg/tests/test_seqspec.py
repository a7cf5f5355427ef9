"""Sequence descriptors: term evaluation, profiles, decomposition, negation."""

from fractions import Fraction

import pytest

from meanweave.dsl import parse_spec
from meanweave.errors import MalformedDescriptor
from meanweave.seqspec import (
    Constant,
    Geometric,
    Linear,
    NegLinear,
    PowerOfIndex,
    RunLength,
    decompose,
    eval_term,
    negated_spec,
    profile,
    run_table,
)

F = Fraction


def terms(spec, k):
    return [eval_term(spec, n) for n in range(1, k + 1)]


# ---------------------------------------------------------------------------
# Frozen term prefixes (each checked by hand against its closed form)

TERM_PREFIXES = [
    ("const(7)", [7, 7, 7, 7, 7, 7]),
    ("linear()", [1, 2, 3, 4, 5, 6]),
    ("neglinear()", [-1, -2, -3, -4, -5, -6]),
    ("pow(2)", [1, 4, 9, 16, 25, 36]),
    ("pow(3)", [1, 8, 27, 64, 125, 216]),
    ("geom(2)", [2, 4, 8, 16, 32, 64]),
    ("geom(3)", [3, 9, 27, 81, 243, 729]),
    ("neg(geom(2))", [-2, -4, -8, -16, -32, -64]),
    ("square(linear())", [1, 4, 9, 16, 25, 36]),
    ("sum(linear(), const(1))", [2, 3, 4, 5, 6, 7]),
    ("interleave(const(0), linear())", [0, 1, 0, 2, 0, 3]),
    ("prefix(5, -3, const(0))", [5, -3, 0, 0, 0, 0]),
    # Index runs whose sums jump: 1,2,3 then 7..10 then 41..45 and so on.
    ("sumjump()", [1, 2, 3, 7, 8, 9, 10, 41, 42, 43, 44, 45]),
    # Run-length families: doubling blocks, staircase, factorial blocks,
    # and the integer ceiling of sqrt(n).
    ("runlen(1)", [1, 2, 2, 4, 4, 4, 8, 8, 8, 8, 16, 16]),
    ("runlen(2)", [1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4]),
    ("runlen(3)", [1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2]),
    ("runlen(4)", [1, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4, 4]),
]


@pytest.mark.parametrize("text,expected", TERM_PREFIXES, ids=[t for t, _ in TERM_PREFIXES])
def test_frozen_term_prefixes(text, expected):
    spec = parse_spec(text)
    assert terms(spec, len(expected)) == [F(v) for v in expected]


def test_affine_scales_then_shifts():
    spec = parse_spec("affine(linear(), 2, 1/2)")
    assert terms(spec, 4) == [F(5, 2), F(9, 2), F(13, 2), F(17, 2)]


def test_runlen_ceiling_sqrt_matches_closed_form():
    import math

    spec = parse_spec("runlen(4)")
    for n in range(1, 400):
        assert eval_term(spec, n) == F(math.isqrt(n - 1) + 1)


def test_iter_terms_agrees_with_eval_term():
    spec = parse_spec("interleave(neg(geom(2)), interleave(const(0), geom(2)))")
    from itertools import islice

    assert list(islice(spec.iter_terms(), 12)) == terms(spec, 12)


def test_run_table_expands_multiplicities_into_a_prefix():
    spec = run_table([(F(5), 3), (F(-1), 2)], parse_spec("const(0)"))
    assert terms(spec, 7) == [F(5), F(5), F(5), F(-1), F(-1), F(0), F(0)]


def test_run_table_rejects_nonpositive_multiplicity():
    with pytest.raises(MalformedDescriptor):
        run_table([(F(5), 0)], parse_spec("const(0)"))


# ---------------------------------------------------------------------------
# Profiles


def test_profile_bounded_two_level():
    p = profile(parse_spec("interleave(const(0), const(1))"))
    assert [(ivl.lo.render(), ivl.hi.render()) for ivl in p.finite_acc] == [("0", "0"), ("1", "1")]
    assert not p.has_neg_inf and not p.has_pos_inf
    assert p.liminf.render() == "0" and p.limsup.render() == "1"


def test_profile_one_sided_divergence():
    p = profile(parse_spec("interleave(const(0), geom(2))"))
    assert [(ivl.lo.render(), ivl.hi.render()) for ivl in p.finite_acc] == [("0", "0")]
    assert not p.has_neg_inf and p.has_pos_inf


def test_profile_two_sided_divergence_without_finite_points():
    p = profile(parse_spec("interleave(neg(linear()), linear())"))
    assert p.finite_acc == ()
    assert p.has_neg_inf and p.has_pos_inf


def test_profile_of_prefix_ignores_the_finite_head():
    p = profile(parse_spec("prefix(100, -100, interleave(const(0), const(1)))"))
    assert [(ivl.lo.render(), ivl.hi.render()) for ivl in p.finite_acc] == [("0", "0"), ("1", "1")]


# ---------------------------------------------------------------------------
# Decomposition


def test_decompose_three_strand_witnesses_partition_source_indices():
    spec = parse_spec("interleave(neg(geom(2)), interleave(const(0), geom(2)))")
    dec = decompose(spec)
    assert dec.b_limit.is_neg_inf and dec.c_limit.is_pos_inf
    assert [str(v) for v in terms(dec.b_part, 4)] == ["-2", "-4", "-8", "-16"]
    assert [str(v) for v in terms(dec.c_part, 4)] == ["2", "4", "8", "16"]
    assert [str(v) for v in terms(dec.d_part, 4)] == ["0", "0", "0", "0"]
    assert [dec.witness("b", k) for k in range(1, 5)] == [1, 3, 5, 7]
    assert [dec.witness("c", k) for k in range(1, 5)] == [4, 8, 12, 16]
    assert [dec.witness("d", k) for k in range(1, 5)] == [2, 6, 10, 14]
    # Witnesses are injective with disjoint images covering every index once.
    seen = [dec.witness(p, k) for p in dec.parts_present for k in range(1, 41)]
    assert len(seen) == len(set(seen))
    covered = sorted(seen)
    assert covered[:40] == list(range(1, 41))


def test_decompose_witness_values_match_source_terms():
    spec = parse_spec("interleave(neg(geom(2)), interleave(const(0), geom(2)))")
    dec = decompose(spec)
    for part in dec.parts_present:
        for k in range(1, 30):
            assert eval_term(dec.part_spec(part), k) == eval_term(spec, dec.witness(part, k))


def test_decompose_emissions_stream():
    dec = decompose(parse_spec("interleave(const(0), geom(2))"))
    from itertools import islice

    got = list(islice(dec.emissions("c"), 3))
    assert got == [(2, F(2)), (4, F(4)), (6, F(8))]


def test_unknown_part_name_rejected():
    dec = decompose(parse_spec("interleave(const(0), const(1))"))
    with pytest.raises(ValueError):
        dec.witness("z", 1)


# ---------------------------------------------------------------------------
# Structural negation


@pytest.mark.parametrize(
    "text",
    [
        "const(7)",
        "linear()",
        "neglinear()",
        "geom(2)",
        "affine(linear(), 2, 1/2)",
        "interleave(neg(geom(2)), interleave(const(0), geom(2)))",
        "prefix(5, -3, const(0))",
        "sumjump()",
    ],
)
def test_negated_spec_is_pointwise_negation(text):
    spec = parse_spec(text)
    neg = negated_spec(spec)
    for n in range(1, 60):
        assert eval_term(neg, n) == -eval_term(spec, n)


def test_negated_spec_simplifies_structurally():
    assert isinstance(negated_spec(NegLinear()), Linear)
    assert isinstance(negated_spec(Linear()), NegLinear)
    c = negated_spec(Constant(F(7)))
    assert isinstance(c, Constant) and eval_term(c, 1) == F(-7)


def test_negated_spec_is_an_involution_pointwise():
    spec = parse_spec("interleave(neg(geom(2)), interleave(const(0), geom(2)))")
    twice = negated_spec(negated_spec(spec))
    for n in range(1, 40):
        assert eval_term(twice, n) == eval_term(spec, n)


# ---------------------------------------------------------------------------
# Constructor validation


def test_constructor_rejections():
    with pytest.raises(MalformedDescriptor):
        Geometric(F(1))
    with pytest.raises(MalformedDescriptor):
        Geometric(F(1, 2))
    with pytest.raises(MalformedDescriptor):
        PowerOfIndex(0)
    with pytest.raises(MalformedDescriptor):
        RunLength(9)
