"""Interval translation maps: nested images, attractors and the induced IET."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import BadPartition, NotStabilized, NullAttractor, ResourceCap, Stabilized
from .iet import Iet, PiecewiseTranslation
from .intervals import IntervalSet
from .scalar import as_scalar, floor, format_scalar

__all__ = [
    "Itm",
    "AttractorResult",
    "image_iterate",
    "image_iterates",
    "attractor",
    "reduce_to_fplus",
    "box_count",
    "box_count_dimension",
    "box_dim_estimate",
    "DEFAULT_COMPONENT_BUDGET",
]

ZERO = Fraction(0)
ONE = Fraction(1)
DEFAULT_COMPONENT_BUDGET = 10**6


@dataclass(frozen=True)
class Itm(PiecewiseTranslation):
    """A piecewise translation of [0, 1) into itself, not necessarily onto."""

    def _validate(self):
        for (lo, hi), i in zip(self.images(), range(self.r)):
            if lo < 0 or hi > 1:
                raise BadPartition(
                    f"atom {i} maps to [{format_scalar(lo)}, {format_scalar(hi)}), outside [0, 1)")

    def push(self, s: IntervalSet) -> IntervalSet:
        """Exact image of an interval set."""
        pieces = []
        for lo, hi, t in self.atoms():
            for a, b in s.clip(lo, hi):
                pieces.append((a + t, b + t))
        return IntervalSet.from_intervals(pieces)

    @classmethod
    def from_iet(cls, f: Iet) -> "Itm":
        return cls(f.breakpoints, f.translations)


def image_iterates(T: Itm, *, budget: int = DEFAULT_COMPONENT_BUDGET) -> Iterator[IntervalSet]:
    """``X, T(X), T^2(X), ...`` with ``X = [0, 1)``."""
    s = IntervalSet.unit()
    while True:
        yield s
        s = T.push(s)
        if len(s) > budget:
            raise ResourceCap(f"image has {len(s)} components", len(s), budget)


def image_iterate(T: Itm, n: int, *, budget: int = DEFAULT_COMPONENT_BUDGET) -> IntervalSet:
    if n < 0:
        raise ValueError("n must be >= 0")
    for k, s in enumerate(image_iterates(T, budget=budget)):
        if k == n:
            return s


@dataclass(frozen=True)
class AttractorResult:
    stabilized: bool
    set: IntervalSet
    depth: int  # stabilization depth N, or the truncation depth
    lengths: tuple  # exact lengths of T^k(X), k = 0..depth

    @property
    def measure(self):
        return self.set.length()


def attractor(T: Itm, max_depth: int, *, budget: int = DEFAULT_COMPONENT_BUDGET) -> AttractorResult:
    """Iterate images until ``T^{N+1}(X) == T^N(X)`` (exact set equality) or ``max_depth``."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    prev = None
    lengths = []
    for k, s in enumerate(image_iterates(T, budget=budget)):
        if prev is not None and s == prev:
            return AttractorResult(True, prev, k - 1, tuple(lengths))
        lengths.append(s.length())
        if k == max_depth:
            return AttractorResult(False, s, k, tuple(lengths))
        prev = s


def reduce_to_fplus(T: Itm, max_depth: int, *, null_tolerance=Fraction(1, 10**9)) -> Iet:
    """The map induced on the stabilized attractor, with gaps collapsed and rescaled to [0, 1).

    Raises :class:`NullAttractor` if the image length drops below
    ``null_tolerance`` within ``max_depth`` and :class:`NotStabilized` if
    the images neither stabilize nor become that small.
    """
    res = attractor(T, max_depth)
    if not res.stabilized:
        if res.measure < as_scalar(null_tolerance):
            raise NullAttractor(f"attractor length below {format_scalar(as_scalar(null_tolerance))} "
                                f"at depth {res.depth}")
        raise NotStabilized(f"images did not stabilize within depth {max_depth}")
    comps = res.set.intervals
    total = res.measure
    offsets, acc = [], ZERO
    for a, b in comps:
        offsets.append(a - acc)  # collapsed coordinate is x - offset
        acc = acc + (b - a)

    def collapse(x):
        for (a, b), off in zip(comps, offsets):
            if a <= x < b:
                return x - off
        raise AssertionError("point left the attractor")

    cells = []
    for (a, b), off in zip(comps, offsets):
        for lo, hi, t in T.atoms():
            lo, hi = max(lo, a), min(hi, b)
            if lo < hi:
                cells.append(((lo - off) / total, (collapse(lo + t) - (lo - off)) / total))
    cells.sort()
    return Iet(tuple(c for c, _ in cells) + (ONE,), tuple(t for _, t in cells))


def box_count(s: IntervalSet, k: int) -> int:
    """Number of dyadic cells ``[j 2^-k, (j+1) 2^-k)`` meeting ``s`` in positive length."""
    scale = 1 << k
    count, covered = 0, -1
    for a, b in s:  # sorted and disjoint, so only the previous cell can be shared
        first = max(floor(a * scale), covered + 1)
        last = -floor(-b * scale) - 1  # ceil(b * scale) - 1
        if last >= first:
            count += last - first + 1
            covered = last
    return count


def box_count_dimension(s: IntervalSet, grid_exponents: Sequence[int]) -> float:
    """Least-squares slope of ``log N(2^-k)`` against ``log 2^k``."""
    ks = sorted(set(grid_exponents))
    if len(ks) < 2:
        raise ValueError("need at least two grid exponents")
    x = np.array([k * math.log(2) for k in ks])
    y = np.array([math.log(box_count(s, k)) for k in ks])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def box_dim_estimate(T: Itm, depth: int, grid_exponents: Sequence[int]) -> float:
    """Box-counting slope of ``T^depth(X)``; a float diagnostic only."""
    res = attractor(T, max(depth, 1))
    if res.stabilized:
        raise Stabilized(f"attractor stabilized at depth {res.depth}; it is a finite union of intervals")
    return box_count_dimension(res.set, grid_exponents)
