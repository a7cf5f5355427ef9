"""Textual descriptor language for sequence specs.

A descriptor is a nested call expression, e.g.
``interleave(const(0), pow(2))``.  ``parse_spec`` and ``render`` are exact
inverses on the constructible spec types, so command lines and reports can
round-trip specs losslessly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Tuple, Union

from .errors import MalformedDescriptor, ParseError
from .seqspec import (
    Affine,
    Constant,
    ExplicitPrefix,
    Geometric,
    Interleave,
    Linear,
    NegLinear,
    Negate,
    PointwiseSquare,
    PointwiseSum,
    PowerOfIndex,
    RunLength,
    SequenceSpec,
    SumJump,
)

__all__ = ["parse_spec", "render"]

Arg = Union[Fraction, SequenceSpec]


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _parse_rational(text: str, i: int) -> Tuple[Fraction, int]:
    start = i
    if i < len(text) and text[i] in "+-":
        i += 1
    digits_start = i
    while i < len(text) and text[i].isdigit():
        i += 1
    if i == digits_start:
        raise ParseError(start, "a rational number")
    num = int(text[start:i])
    j = _skip_ws(text, i)
    if j < len(text) and text[j] == "/":
        j = _skip_ws(text, j + 1)
        den_start = j
        while j < len(text) and text[j].isdigit():
            j += 1
        if j == den_start:
            raise ParseError(den_start, "a positive denominator")
        den = int(text[den_start:j])
        if den == 0:
            raise ParseError(den_start, "a positive denominator")
        return Fraction(num, den), j
    return Fraction(num), i


def _parse_name(text: str, i: int) -> Tuple[str, int]:
    start = i
    while i < len(text) and (text[i].isalpha() or text[i] == "_"):
        i += 1
    if i == start:
        raise ParseError(start, "a constructor name")
    return text[start:i], i


def _parse_arg(text: str, i: int) -> Tuple[Arg, int]:
    i = _skip_ws(text, i)
    if i >= len(text):
        raise ParseError(i, "an argument")
    if text[i].isdigit() or text[i] in "+-":
        return _parse_rational(text, i)
    return _parse_call(text, i)


def _parse_call(text: str, i: int) -> Tuple[SequenceSpec, int]:
    i = _skip_ws(text, i)
    name_at = i
    name, i = _parse_name(text, i)
    i = _skip_ws(text, i)
    if i >= len(text) or text[i] != "(":
        raise ParseError(i, "'('")
    i = _skip_ws(text, i + 1)
    args: List[Arg] = []
    if i < len(text) and text[i] == ")":
        i += 1
    else:
        while True:
            arg, i = _parse_arg(text, i)
            args.append(arg)
            i = _skip_ws(text, i)
            if i < len(text) and text[i] == ",":
                i = _skip_ws(text, i + 1)
                continue
            if i < len(text) and text[i] == ")":
                i += 1
                break
            raise ParseError(i, "',' or ')'")
    try:
        return _build(name, args, name_at), i
    except MalformedDescriptor as exc:
        raise ParseError(name_at, str(exc)) from exc


def _want(args: List[Arg], shape: str, name: str, at: int) -> None:
    """shape: one letter per argument, 'q' rational or 's' spec."""
    kinds = "".join("q" if isinstance(a, Fraction) else "s" for a in args)
    if kinds != shape:
        raise ParseError(
            at, f"{name} takes ({', '.join(_SHAPE_WORDS[c] for c in shape) or ''})"
        )


_SHAPE_WORDS = {"q": "rational", "s": "spec"}


def _build(name: str, args: List[Arg], at: int) -> SequenceSpec:
    if name == "const":
        _want(args, "q", name, at)
        return Constant(args[0])
    if name == "pow":
        _want(args, "q", name, at)
        k = args[0]
        if k.denominator != 1:
            raise ParseError(at, "pow takes an integer exponent")
        return PowerOfIndex(int(k))
    if name == "geom":
        _want(args, "q", name, at)
        return Geometric(args[0])
    if name == "linear":
        _want(args, "", name, at)
        return Linear()
    if name == "neglinear":
        _want(args, "", name, at)
        return NegLinear()
    if name == "sumjump":
        _want(args, "", name, at)
        return SumJump()
    if name == "neg":
        _want(args, "s", name, at)
        return Negate(args[0])
    if name == "square":
        _want(args, "s", name, at)
        return PointwiseSquare(args[0])
    if name == "affine":
        _want(args, "sqq", name, at)
        return Affine(args[0], args[1], args[2])
    if name == "interleave":
        _want(args, "ss", name, at)
        return Interleave(args[0], args[1])
    if name == "sum":
        _want(args, "ss", name, at)
        return PointwiseSum(args[0], args[1])
    if name == "runlen":
        _want(args, "q", name, at)
        rule = args[0]
        if rule.denominator != 1:
            raise ParseError(at, "runlen takes an integer rule number")
        return RunLength(int(rule))
    if name == "prefix":
        if len(args) < 2 or not isinstance(args[-1], SequenceSpec):
            raise ParseError(at, "prefix takes (rational..., spec)")
        values = args[:-1]
        if not all(isinstance(v, Fraction) for v in values):
            raise ParseError(at, "prefix takes (rational..., spec)")
        return ExplicitPrefix(tuple(values), args[-1])
    raise ParseError(at, "a known constructor name")


def parse_spec(text: str) -> SequenceSpec:
    """Parse a descriptor; trailing garbage is an error."""
    if not text or not text.strip():
        raise ParseError(0, "a nonempty descriptor")
    spec, i = _parse_call(text, 0)
    i = _skip_ws(text, i)
    if i != len(text):
        raise ParseError(i, "end of input")
    return spec


def _rat(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def render(spec: SequenceSpec) -> str:
    """Inverse of parse_spec on all constructible spec types."""
    if isinstance(spec, Constant):
        return f"const({_rat(spec.value)})"
    if isinstance(spec, PowerOfIndex):
        return f"pow({spec.exponent})"
    if isinstance(spec, Geometric):
        return f"geom({_rat(spec.ratio)})"
    if isinstance(spec, Linear):
        return "linear()"
    if isinstance(spec, NegLinear):
        return "neglinear()"
    if isinstance(spec, SumJump):
        return "sumjump()"
    if isinstance(spec, Negate):
        return f"neg({render(spec.base)})"
    if isinstance(spec, PointwiseSquare):
        return f"square({render(spec.base)})"
    if isinstance(spec, Affine):
        return (
            f"affine({render(spec.base)}, {_rat(spec.scale)}, {_rat(spec.shift)})"
        )
    if isinstance(spec, Interleave):
        return f"interleave({render(spec.first)}, {render(spec.second)})"
    if isinstance(spec, PointwiseSum):
        return f"sum({render(spec.first)}, {render(spec.second)})"
    if isinstance(spec, RunLength):
        return f"runlen({int(spec.rule)})"
    if isinstance(spec, ExplicitPrefix):
        vals = ", ".join(_rat(v) for v in spec.values)
        return f"prefix({vals}, {render(spec.tail)})"
    raise MalformedDescriptor(f"no textual form for {type(spec).__name__}")
