"""Exact scalar arithmetic: rationals and degree-2 extensions a + b*sqrt(d).

Rationals are plain ``fractions.Fraction`` values.  ``QuadExt`` adds just
enough quadratic-irrational arithmetic to represent roots of a rational
quadratic and decide their signs exactly; it is not a general algebraic
number type.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rat = Fraction

Scalar = Union[Fraction, "QuadExt"]


def rat(value) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def rat_to_str(value: Fraction) -> str:
    """Canonical 'p/q' form with q > 0, denominator always explicit."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


_SCALAR_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def rat_from_str(text: str) -> Fraction:
    """Parse 'p/q' (canonical) or a bare integer string."""
    if not isinstance(text, str):
        raise ValueError(f"expected scalar string, got {type(text).__name__}")
    if not _SCALAR_RE.match(text.strip()):
        raise ValueError(f"scalar must be 'p/q' or an integer, got {text!r}")
    return Fraction(text)


def _rational_sqrt(value: Fraction):
    """Return sqrt(value) as a Fraction if value is a perfect rational square."""
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


class DegenerateInput(ValueError):
    """Raised for geometrically invalid inputs such as zero-length segments."""


@dataclass(frozen=True)
class QuadExt:
    """Exact value a + b*sqrt(d) with a, b, d rational and d >= 0.

    Values normalize on construction: if d is zero or a perfect rational
    square the value collapses to its rational part (b folded into a).
    Arithmetic is closed only for operands sharing the same radicand.
    """

    a: Fraction
    b: Fraction
    d: Fraction

    def __init__(self, a, b=0, d=0):
        a, b, d = rat(a), rat(b), rat(d)
        if d < 0:
            raise ValueError("negative radicand")
        root = _rational_sqrt(d)
        if b == 0 or d == 0:
            b, d = Fraction(0), Fraction(0)
        elif root is not None:
            a, b, d = a + b * root, Fraction(0), Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    # -- helpers -----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self.a

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.b != 0 and self.b != 0 and other.d != self.d:
                raise ValueError(f"mixed radicands {self.d} and {other.d}")
            return other
        return QuadExt(rat(other))

    def _join_radicand(self, other: "QuadExt") -> Fraction:
        return self.d if self.b != 0 else other.d

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        return QuadExt(self.a + o.a, self.b + o.b, self._join_radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._join_radicand(o)
        return QuadExt(
            self.a * o.a + self.b * o.b * d,
            self.a * o.b + self.b * o.a,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            if self.a == 0 and self.b == 0:
                raise ZeroDivisionError("division by zero")
            # a^2 = b^2 d with a, b nonzero would make d a perfect square,
            # which normalization already collapsed.
            raise ZeroDivisionError("division by zero quad value")
        return QuadExt(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    # -- exact sign and order ----------------------------------------------

    def sign(self) -> int:
        """Exact sign in {-1, 0, +1}, comparing a^2 against b^2 d."""
        sa = _sign(self.a)
        if self.b == 0:
            return sa
        sb = _sign(self.b)
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        lhs, rhs = self.a * self.a, self.b * self.b * self.d
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __bool__(self):
        return self.sign() != 0

    def __eq__(self, other):
        try:
            return (self - other).sign() == 0
        except (ValueError, TypeError):
            return NotImplemented

    def __hash__(self):
        if self.is_rational:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(float(self.d))

    def __repr__(self):
        if self.is_rational:
            return f"QuadExt({self.a})"
        return f"QuadExt({self.a} + {self.b}*sqrt({self.d}))"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"a": rat_to_str(self.a), "b": rat_to_str(self.b), "d": rat_to_str(self.d)}

    @staticmethod
    def from_json(doc: dict) -> "QuadExt":
        return QuadExt(rat_from_str(doc["a"]), rat_from_str(doc["b"]), rat_from_str(doc["d"]))


def _sign(x: Fraction) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def sign_of(x) -> int:
    """Exact sign of a Fraction, int, or QuadExt."""
    if isinstance(x, QuadExt):
        return x.sign()
    return _sign(rat(x))


def scalar_to_json(x):
    """Serialize a Fraction as 'p/q' or a QuadExt as its field dict."""
    if isinstance(x, QuadExt):
        if x.is_rational:
            return rat_to_str(x.a)
        return x.to_json()
    return rat_to_str(rat(x))


def scalar_from_json(doc):
    if isinstance(doc, dict):
        return QuadExt.from_json(doc)
    return rat_from_str(doc)
