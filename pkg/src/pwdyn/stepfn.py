"""Exact piecewise-constant densities on [0, 1).

A :class:`StepFn` holds breakpoints ``0 = x_0 < ... < x_k = 1`` and values
``v_i`` on ``[x_i, x_{i+1})``.  Adjacent cells with equal values are merged
on construction, so two step functions are equal iff their representations
are equal.

Variation is that of the zero extension to an open interval containing
[0, 1]: the jumps at 0 and 1 against the outside value 0 are counted.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .intervals import IntervalSet
from .scalar import Scalar, as_scalar, format_scalar, parse_scalar, to_float

__all__ = [
    "StepFn",
    "integrate",
    "variation",
    "bv_norm",
    "linear",
    "l1_distance",
    "vanish_on",
]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class StepFn:
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(as_scalar(x) for x in self.breakpoints)
        vals = tuple(as_scalar(v) for v in self.values)
        if len(bps) != len(vals) + 1 or not vals:
            raise ValueError("need k >= 1 values and k + 1 breakpoints")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        for lo, hi in zip(bps, bps[1:]):
            if not lo < hi:
                raise ValueError("breakpoints must be strictly increasing")
        nb, nv = [bps[0]], [vals[0]]
        for x, v in zip(bps[1:-1], vals[1:]):
            if v == nv[-1]:
                continue
            nb.append(x)
            nv.append(v)
        nb.append(bps[-1])
        object.__setattr__(self, "breakpoints", tuple(nb))
        object.__setattr__(self, "values", tuple(nv))

    # -- constructors --------------------------------------------------
    @classmethod
    def constant(cls, c=1) -> "StepFn":
        return cls((ZERO, ONE), (as_scalar(c),))

    @classmethod
    def zero(cls) -> "StepFn":
        return cls.constant(0)

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple]) -> "StepFn":
        """Build from ``(a, b, value)`` triples with disjoint supports; gaps are 0."""
        items = sorted((as_scalar(a), as_scalar(b), as_scalar(v)) for a, b, v in pieces)
        bps, vals = [ZERO], []
        cur = ZERO
        for a, b, v in items:
            if not a < b:
                continue
            if a < cur:
                raise ValueError(f"overlapping pieces near {format_scalar(a)}")
            if a > cur:
                vals.append(ZERO)
                bps.append(a)
            vals.append(v)
            bps.append(b)
            cur = b
        if cur > 1 or items and items[0][0] < 0:
            raise ValueError("pieces must lie in [0, 1)")
        if cur < 1:
            vals.append(ZERO)
            bps.append(ONE)
        return cls(tuple(bps), tuple(vals))

    @classmethod
    def indicator(cls, a, b, value=1) -> "StepFn":
        """``value * chi_[a, b)``."""
        if as_scalar(a) > as_scalar(b):
            raise ValueError(f"indicator interval [{format_scalar(a)}, {format_scalar(b)}) is reversed")
        return cls.from_pieces([(a, b, value)])

    @classmethod
    def indicator_of(cls, s: IntervalSet, value=1) -> "StepFn":
        return cls.from_pieces((a, b, value) for a, b in s)

    @classmethod
    def from_jumps(cls, jumps: dict) -> "StepFn":
        """Rebuild from ``{x: v(x) - v(x-)}``, positions in [0, 1)."""
        bps, vals = [], []
        acc = ZERO
        for x in sorted(jumps):
            acc = acc + jumps[x]
            if bps and bps[-1] == x:
                vals[-1] = acc
            else:
                bps.append(x)
                vals.append(acc)
        if not bps or bps[0] != 0:
            bps.insert(0, ZERO)
            vals.insert(0, ZERO)
        return cls(tuple(bps) + (ONE,), tuple(vals))

    # -- access --------------------------------------------------------
    def cells(self) -> Iterator[tuple]:
        return zip(self.breakpoints, self.breakpoints[1:], self.values)

    def __len__(self):
        return len(self.values)

    def __call__(self, x) -> Scalar:
        x = as_scalar(x)
        if not 0 <= x < 1:
            raise ValueError("x outside [0, 1)")
        return self.values[bisect_right(self.breakpoints, x) - 1]

    def jumps(self) -> list[tuple]:
        """``(x_i, v_i - v_{i-1})`` for i < k, with ``v_{-1} = 0``."""
        out, prev = [], ZERO
        for x, v in zip(self.breakpoints, self.values):
            if v != prev:
                out.append((x, v - prev))
            prev = v
        return out

    def slice(self, a, b) -> list[tuple]:
        """Cells of ``self`` restricted to ``[a, b)`` as ``(lo, hi, v)`` triples."""
        out = []
        i = bisect_right(self.breakpoints, a) - 1
        bps, vals = self.breakpoints, self.values
        while i < len(vals) and bps[i] < b:
            lo = max(bps[i], a)
            hi = min(bps[i + 1], b)
            if lo < hi:
                out.append((lo, hi, vals[i]))
            i += 1
        return out

    def max_abs(self) -> Scalar:
        return max(abs(v) for v in self.values)

    # -- algebra -------------------------------------------------------
    def map_values(self, fn) -> "StepFn":
        return StepFn(self.breakpoints, tuple(fn(v) for v in self.values))

    def __mul__(self, c) -> "StepFn":
        c = as_scalar(c)
        return self.map_values(lambda v: v * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "StepFn":
        c = as_scalar(c)
        return self.map_values(lambda v: v / c)

    def __neg__(self) -> "StepFn":
        return self.map_values(lambda v: -v)

    def __abs__(self) -> "StepFn":
        return self.map_values(abs)

    def __add__(self, other: "StepFn") -> "StepFn":
        return linear(self, other, ONE, ONE)

    def __sub__(self, other: "StepFn") -> "StepFn":
        return linear(self, other, ONE, -ONE)

    def integrate(self) -> Scalar:
        return sum(((b - a) * v for a, b, v in self.cells()), ZERO)

    def variation(self) -> Scalar:
        vals = self.values
        total = abs(vals[0]) + abs(vals[-1])
        for u, v in zip(vals, vals[1:]):
            total = total + abs(v - u)
        return total

    def bv_norm(self) -> Scalar:
        return abs(self).integrate() + self.variation()

    def vanish_on(self, region: IntervalSet) -> "StepFn":
        """``self`` times the indicator of the complement of ``region``."""
        keep = region.complement(0, 1)
        pieces = []
        for a, b in keep:
            pieces.extend(self.slice(a, b))
        return StepFn.from_pieces(pieces)

    def support(self) -> IntervalSet:
        return IntervalSet.from_intervals((a, b) for a, b, v in self.cells() if v != 0)

    # -- serialization -------------------------------------------------
    def to_json(self) -> dict:
        return {
            "breakpoints": [format_scalar(x) for x in self.breakpoints],
            "values": [format_scalar(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepFn":
        return cls(
            tuple(parse_scalar(x) for x in data["breakpoints"]),
            tuple(parse_scalar(v) for v in data["values"]),
        )

    def sample(self, count: int) -> list[tuple[float, float]]:
        """``count`` evenly spaced float samples ``(x, value)`` for plotting."""
        return [(i / count, to_float(self(Fraction(i, count)))) for i in range(count)]


def linear(phi: StepFn, psi: StepFn, alpha, beta) -> StepFn:
    """``alpha * phi + beta * psi`` on the common refinement."""
    alpha, beta = as_scalar(alpha), as_scalar(beta)
    pb, pv = phi.breakpoints, phi.values
    qb, qv = psi.breakpoints, psi.values
    bps, vals = [ZERO], []
    i = j = 0
    while i < len(pv) and j < len(qv):
        vals.append(alpha * pv[i] + beta * qv[j])
        hi_p, hi_q = pb[i + 1], qb[j + 1]
        if hi_p < hi_q:
            bps.append(hi_p)
            i += 1
        elif hi_q < hi_p:
            bps.append(hi_q)
            j += 1
        else:
            bps.append(hi_p)
            i += 1
            j += 1
    return StepFn(tuple(bps), tuple(vals))


def l1_distance(phi: StepFn, psi: StepFn) -> Scalar:
    return abs(linear(phi, psi, ONE, -ONE)).integrate()


integrate = StepFn.integrate
variation = StepFn.variation
bv_norm = StepFn.bv_norm
vanish_on = StepFn.vanish_on
