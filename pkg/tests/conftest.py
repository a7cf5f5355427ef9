"""Shared fixtures: the classification catalog and small helpers."""

from fractions import Fraction

import pytest

from meanweave.dsl import parse_spec

# Descriptor text -> rendered attainable-average set, for the six standard
# shapes: bounded two-level, polynomial one-sided, geometric one-sided,
# geometric two-sided with a convergent middle strand, linear two-sided,
# and a convergent sequence.
CLASSIFY_CATALOG = [
    ("interleave(const(0), const(1))", "[0, 1]"),
    ("interleave(const(0), pow(2))", "[0, +inf]"),
    ("interleave(const(0), geom(2))", "{0} ∪ {+inf}"),
    (
        "interleave(neg(geom(2)), interleave(const(0), geom(2)))",
        "{-inf} ∪ {0} ∪ {+inf}",
    ),
    ("interleave(neg(linear()), linear())", "{-inf} ∪ {+inf}"),
    ("const(7)", "{7}"),
]


@pytest.fixture
def catalog_specs():
    return [(parse_spec(text), expected) for text, expected in CLASSIFY_CATALOG]


def frac(text: str) -> Fraction:
    return Fraction(text)
