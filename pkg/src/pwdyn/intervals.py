"""Finite unions of half-open intervals with exact endpoints."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .scalar import Scalar, as_scalar, format_scalar, parse_scalar

__all__ = ["IntervalSet", "UNIT"]


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint, non-adjacent half-open intervals ``[a, b)``.

    Build through :meth:`from_intervals`, which sorts, drops empty pieces and
    merges touching or overlapping ones, so that equal sets have equal
    representations.
    """

    intervals: tuple[tuple[Scalar, Scalar], ...] = ()

    @classmethod
    def from_intervals(cls, pieces: Iterable[tuple]) -> "IntervalSet":
        items = sorted((as_scalar(a), as_scalar(b)) for a, b in pieces)
        merged: list[list] = []
        for a, b in items:
            if not a < b:
                continue
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1][1] = b
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    @classmethod
    def unit(cls) -> "IntervalSet":
        return cls(((Fraction(0), Fraction(1)),))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def length(self) -> Scalar:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def contains(self, x) -> bool:
        x = as_scalar(x)
        return any(a <= x < b for a, b in self.intervals)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_intervals(self.intervals + other.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        A, B = self.intervals, other.intervals
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo < hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def clip(self, a, b) -> "IntervalSet":
        return self.intersection(IntervalSet.from_intervals([(a, b)]))

    def complement(self, lo=0, hi=1) -> "IntervalSet":
        """Complement relative to ``[lo, hi)``."""
        lo, hi = as_scalar(lo), as_scalar(hi)
        out = []
        cur = lo
        for a, b in self.intervals:
            if a > cur:
                out.append((cur, min(a, hi)))
            cur = max(cur, b)
        if cur < hi:
            out.append((cur, hi))
        return IntervalSet.from_intervals(out)

    def translate(self, t) -> "IntervalSet":
        return IntervalSet(tuple((a + t, b + t) for a, b in self.intervals))

    def issubset(self, other: "IntervalSet") -> bool:
        return self.intersection(other) == self

    def to_json(self) -> list:
        return [[format_scalar(a), format_scalar(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        return cls.from_intervals((parse_scalar(a), parse_scalar(b)) for a, b in data)


UNIT = IntervalSet.unit()
