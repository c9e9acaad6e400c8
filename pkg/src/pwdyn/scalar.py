"""Exact scalars: rationals (``fractions.Fraction``) and elements of a real
quadratic field Q(sqrt d).

Rationals are plain :class:`~fractions.Fraction` objects.  A
:class:`QuadScalar` is only ever produced when its irrational part is
nonzero; any arithmetic result with a vanishing ``sqrt(d)`` coefficient
collapses back to a ``Fraction``.  This keeps the rational fast path fast
and makes equality between the two representations trivial.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

__all__ = [
    "QuadScalar",
    "Scalar",
    "MixedFields",
    "as_scalar",
    "compare",
    "floor",
    "mod_one",
    "parse_scalar",
    "format_scalar",
    "field_of",
    "to_float",
    "sqrt",
]


class MixedFields(ValueError):
    """Raised when elements of Q(sqrt d1) and Q(sqrt d2), d1 != d2, meet."""


def _squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


class QuadScalar:
    """``(num_a + num_b * sqrt(d)) / den`` with integer coefficients.

    Instances are immutable and always have ``num_b != 0``; use
    :func:`QuadScalar.make` to build a value that may collapse to a
    ``Fraction``.
    """

    __slots__ = ("_a", "_b", "_den", "_d")

    def __init__(self, a, b, d: int):
        a = Fraction(a)
        b = Fraction(b)
        if not _squarefree(d):
            raise ValueError(f"d must be a square-free integer >= 2, got {d}")
        if b == 0:
            raise ValueError("irrational part is zero; use QuadScalar.make")
        den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(a.numerator * (den // a.denominator), b.numerator * (den // b.denominator), den, d)

    def _set(self, na: int, nb: int, den: int, d: int) -> None:
        g = math.gcd(math.gcd(na, nb), den)
        if g != 1:
            na //= g
            nb //= g
            den //= g
        object.__setattr__(self, "_a", na)
        object.__setattr__(self, "_b", nb)
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    @classmethod
    def make(cls, a, b, d: int) -> "Scalar":
        """Return ``a + b*sqrt(d)``, collapsing to a ``Fraction`` when ``b == 0``."""
        b = Fraction(b)
        if b == 0:
            return Fraction(a)
        return cls(a, b, d)

    @classmethod
    def _raw(cls, na: int, nb: int, den: int, d: int) -> "Scalar":
        if den < 0:
            na, nb, den = -na, -nb, -den
        if nb == 0:
            return Fraction(na, den)
        obj = object.__new__(cls)
        obj._set(na, nb, den, d)
        return obj

    # -- accessors -----------------------------------------------------
    @property
    def a(self) -> Fraction:
        return Fraction(self._a, self._den)

    @property
    def b(self) -> Fraction:
        return Fraction(self._b, self._den)

    @property
    def d(self) -> int:
        return self._d

    def conjugate(self) -> "QuadScalar":
        return QuadScalar._raw(self._a, -self._b, self._den, self._d)

    # -- coercion ------------------------------------------------------
    def _coerce(self, other):
        """Return ``(na, nb, den)`` for ``other`` or ``None`` if unsupported."""
        if isinstance(other, QuadScalar):
            if other._d != self._d:
                raise MixedFields(f"cannot combine Q(sqrt {self._d}) with Q(sqrt {other._d})")
            return other._a, other._b, other._den
        if isinstance(other, int):
            return other, 0, 1
        if isinstance(other, _RationalABC):
            return other.numerator, 0, other.denominator
        return None

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        na, nb, den = o
        return QuadScalar._raw(self._a * den + na * self._den, self._b * den + nb * self._den,
                               self._den * den, self._d)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar._raw(-self._a, -self._b, self._den, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        na, nb, den = o
        return QuadScalar._raw(self._a * den - na * self._den, self._b * den - nb * self._den,
                               self._den * den, self._d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        na, nb, den = o
        return QuadScalar._raw(na * self._den - self._a * den, nb * self._den - self._b * den,
                               self._den * den, self._d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        na, nb, den = o
        a, b = self._a, self._b
        return QuadScalar._raw(a * na + b * nb * self._d, a * nb + b * na, self._den * den, self._d)

    __rmul__ = __mul__

    def _inverse_parts(self):
        # 1/((a + b r)/D) = D (a - b r) / (a^2 - b^2 d); nonzero since b != 0 and d square-free
        norm = self._a * self._a - self._b * self._b * self._d
        return self._den * self._a, -self._den * self._b, norm

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        na, nb, den = o
        if na == 0 and nb == 0:
            raise ZeroDivisionError("division by zero")
        if nb == 0:
            return QuadScalar._raw(self._a * den, self._b * den, self._den * na, self._d)
        inv = QuadScalar._raw(na, nb, den, self._d)
        ia, ib, iden = inv._inverse_parts()
        return self * QuadScalar._raw(ia, ib, iden, self._d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        na, nb, den = o
        ia, ib, iden = self._inverse_parts()
        return QuadScalar._raw(na, nb, den, self._d) * QuadScalar._raw(ia, ib, iden, self._d)

    # -- order ---------------------------------------------------------
    def sign(self) -> int:
        return _sign_parts(self._a, self._b, self._d)

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        na, nb, den = o
        return _sign_parts(self._a * den - na * self._den, self._b * den - nb * self._den, self._d)

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            return (self._d, self._a, self._b, self._den) == (other._d, other._a, other._b, other._den)
        if isinstance(other, (int, _RationalABC)):
            return False  # irrational part is never zero
        return NotImplemented

    def __hash__(self):
        return hash((self._a, self._b, self._den, self._d))

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return to_float(self)

    def __repr__(self):
        return f"QuadScalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)

    def __reduce__(self):
        return (QuadScalar, (self.a, self.b, self._d))


Scalar = Union[Fraction, QuadScalar]


def _sign_parts(a: int, b: int, d: int) -> int:
    """Exact sign of ``a + b*sqrt(d)`` for integers ``a, b``."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 against b^2 d (never equal, d square-free)
    return sa if a * a > b * b * d else sb


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, QuadScalars and scalar strings to a Scalar."""
    if isinstance(x, QuadScalar):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar (floats are not accepted)")


def field_of(*xs) -> int | None:
    """Return the common ``d`` of the arguments (``None`` if all rational)."""
    d = None
    for x in xs:
        if isinstance(x, QuadScalar):
            if d is None:
                d = x.d
            elif d != x.d:
                raise MixedFields(f"cannot combine Q(sqrt {d}) with Q(sqrt {x.d})")
    return d


def compare(x, y) -> int:
    """Return -1, 0 or 1 according to the exact order of ``x`` and ``y``."""
    diff = as_scalar(x) - as_scalar(y)
    if isinstance(diff, QuadScalar):
        return diff.sign()
    return (diff > 0) - (diff < 0)


def floor(x) -> int:
    """Exact floor.

    For quadratic values ``sqrt(d)`` is bracketed by ``isqrt(d * 4**p) / 2**p``
    and the bracket refined until both ends share an integer part.
    """
    x = as_scalar(x)
    if isinstance(x, Fraction):
        return x.numerator // x.denominator
    a, b, den, d = x._a, x._b, x._den, x._d
    p = 0
    while True:
        scale = 1 << p
        s = math.isqrt(b * b * d * scale * scale)  # |b| sqrt(d) * 2^p in (s, s+1)
        lo, hi = (s, s + 1) if b > 0 else (-s - 1, -s)
        den_s = den * scale
        k = (a * scale + lo) // den_s
        # value lies strictly inside ((a 2^p + lo)/den_s, (a 2^p + hi)/den_s)
        if a * scale + hi <= (k + 1) * den_s:
            return k
        p += 8


def mod_one(x) -> Scalar:
    """``x - floor(x)``, an exact value in [0, 1)."""
    x = as_scalar(x)
    return x - floor(x)


def sqrt(d: int) -> QuadScalar:
    """The generator ``sqrt(d)`` of Q(sqrt d)."""
    return QuadScalar(0, 1, d)


def to_float(x) -> float:
    """Floating approximation, for diagnostics and plotting only."""
    x = as_scalar(x)
    if isinstance(x, Fraction):
        return float(x)
    a, b = x.a, x.b
    # cancellation-free route: (a^2 - b^2 d) / (a - b sqrt d) when signs oppose
    r = math.sqrt(x.d)
    if (a > 0) != (b > 0) and a != 0:
        norm = a * a - b * b * x.d
        return float(norm) / (float(a) - float(b) * r)
    return float(a) + float(b) * r


# -- textual syntax ------------------------------------------------------
_RAT = r"[+-]?\s*\d+(?:\s*/\s*\d+)?"
_QUAD_RE = re.compile(
    rf"^\s*(?:(?P<a>{_RAT})\s*(?P<op>[+-])\s*)?(?P<b>{_RAT})\s*\*\s*sqrt\(\s*(?P<d>\d+)\s*\)\s*$"
)
_RAT_RE = re.compile(rf"^\s*{_RAT}\s*$")


def _parse_rat(text: str) -> Fraction:
    return Fraction(text.replace(" ", ""))


def parse_scalar(text: str) -> Scalar:
    """Parse ``p/q`` or ``p/q + r/s*sqrt(d)`` (either part may carry a sign)."""
    if _RAT_RE.match(text):
        return _parse_rat(text)
    m = _QUAD_RE.match(text)
    if not m:
        raise ValueError(f"not an exact scalar: {text!r}")
    a = _parse_rat(m.group("a")) if m.group("a") else Fraction(0)
    b = _parse_rat(m.group("b"))
    if m.group("op") == "-":
        b = -b
    return QuadScalar.make(a, b, int(m.group("d")))


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Inverse of :func:`parse_scalar`."""
    x = as_scalar(x)
    if isinstance(x, Fraction):
        return _fmt_rat(x)
    return f"{_fmt_rat(x.a)} + {_fmt_rat(x.b)}*sqrt({x.d})"
