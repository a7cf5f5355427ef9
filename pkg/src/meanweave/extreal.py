"""Extended real numbers: rationals plus the two infinities.

The library never touches floats on the exact path; finite values are
``fractions.Fraction`` and the infinities are two interned sentinels.
``ExtendedReal`` is totally ordered and hashable, so it can key dicts and
sort interval endpoints.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


class ExtendedReal:
    """Either a finite rational or one of the infinities.

    Use the module constants ``NEG_INF`` / ``POS_INF`` and the factory
    ``ExtendedReal.of`` rather than calling the constructor with sign != 0.
    """

    __slots__ = ("_sign", "_value")

    def __init__(self, value: Rational = 0, _sign: int = 0):
        # _sign: -1 for -inf, +1 for +inf, 0 for finite.
        self._sign = _sign
        self._value = Fraction(value) if _sign == 0 else None

    @staticmethod
    def of(value: "Rational | ExtendedReal") -> "ExtendedReal":
        if isinstance(value, ExtendedReal):
            return value
        return ExtendedReal(value)

    @property
    def is_finite(self) -> bool:
        return self._sign == 0

    @property
    def is_pos_inf(self) -> bool:
        return self._sign > 0

    @property
    def is_neg_inf(self) -> bool:
        return self._sign < 0

    @property
    def value(self) -> Fraction:
        """The finite rational value; raises on infinities."""
        if self._sign != 0:
            raise ValueError("infinite ExtendedReal has no rational value")
        return self._value

    def _key(self):
        # Totally ordered tuple: sign major, finite value minor.
        if self._sign != 0:
            return (self._sign, Fraction(0))
        return (0, self._value)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExtendedReal(other)
        if not isinstance(other, ExtendedReal):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExtendedReal(other)
        return self._key() < other._key()

    def __le__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExtendedReal(other)
        return self._key() <= other._key()

    def __gt__(self, other) -> bool:
        return not self.__le__(other)

    def __ge__(self, other) -> bool:
        return not self.__lt__(other)

    def __hash__(self) -> int:
        return hash(self._key())

    def __neg__(self) -> "ExtendedReal":
        if self._sign != 0:
            return NEG_INF if self._sign > 0 else POS_INF
        return ExtendedReal(-self._value)

    def __repr__(self) -> str:
        return f"ExtendedReal({self.render()!r})"

    def render(self, exact: bool = False) -> str:
        """Human form: ``-inf`` / ``+inf`` / ``3`` / ``1/2``.

        With ``exact=True`` finite values always carry a denominator
        (``3/1``), so round-tripping never loses the rational type.
        """
        if self._sign < 0:
            return "-inf"
        if self._sign > 0:
            return "+inf"
        v = self._value
        if exact:
            return f"{v.numerator}/{v.denominator}"
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"

    @staticmethod
    def parse(text: str) -> "ExtendedReal":
        text = text.strip()
        if text == "-inf":
            return NEG_INF
        if text == "+inf" or text == "inf":
            return POS_INF
        return ExtendedReal(Fraction(text))


NEG_INF = ExtendedReal(_sign=-1)
POS_INF = ExtendedReal(_sign=+1)


def as_fraction(x: Rational) -> Fraction:
    """Cheap normalizer used throughout the package."""
    return x if isinstance(x, Fraction) else Fraction(x)
