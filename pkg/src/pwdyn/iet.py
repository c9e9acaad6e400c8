"""Interval exchange transformations with exact breakpoints.

An IET is stored as breakpoints ``0 = b_0 < ... < b_r = 1`` and one
translation per atom; atom ``[b_i, b_{i+1})`` moves by ``x -> x + t_i``.
Construction checks that the translated atoms tile [0, 1) and merges
neighbouring atoms that share a translation.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import BadPartition, NoFinitePartition, NotBijective, OutOfDomain, ResourceCap
from .intervals import IntervalSet
from .scalar import Scalar, as_scalar, field_of, floor, format_scalar, parse_scalar
from .stepfn import StepFn

__all__ = [
    "Iet",
    "CyclePartition",
    "NoClosureAtDepth",
    "KeaneResult",
    "new_iet",
    "rotation",
    "from_permutation",
    "evaluate",
    "inverse",
    "compose",
    "power",
    "transfer",
    "birkhoff",
    "birkhoff_averages",
    "boundary_orbit",
    "neighborhood",
    "keane_check",
    "invariant_cycles",
    "project_invariant",
    "keynes_newton",
    "nomadic_gap",
    "DEFAULT_CELL_BUDGET",
]

ZERO = Fraction(0)
ONE = Fraction(1)
DEFAULT_CELL_BUDGET = 10**6


def _check_partition(breakpoints: Sequence, translations: Sequence):
    bps = tuple(as_scalar(b) for b in breakpoints)
    ts = tuple(as_scalar(t) for t in translations)
    if len(bps) != len(ts) + 1 or not ts:
        raise BadPartition("need r >= 1 translations and r + 1 breakpoints")
    if bps[0] != 0 or bps[-1] != 1:
        raise BadPartition("breakpoints must start at 0 and end at 1")
    for lo, hi in zip(bps, bps[1:]):
        if not lo < hi:
            raise BadPartition(f"breakpoints not strictly increasing at {format_scalar(hi)}")
    field_of(*bps, *ts)
    return bps, ts


def _merge_equal(bps, ts):
    nb, nt = [bps[0]], [ts[0]]
    for b, t in zip(bps[1:-1], ts[1:]):
        if t == nt[-1]:
            continue
        nb.append(b)
        nt.append(t)
    nb.append(bps[-1])
    return tuple(nb), tuple(nt)


@dataclass(frozen=True)
class PiecewiseTranslation:
    """Shared storage and evaluation for IETs and interval translation maps."""

    breakpoints: tuple
    translations: tuple

    def __post_init__(self):
        bps, ts = _check_partition(self.breakpoints, self.translations)
        bps, ts = _merge_equal(bps, ts)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "translations", ts)
        self._validate()

    def _validate(self):
        pass

    @property
    def r(self) -> int:
        return len(self.translations)

    @property
    def field_d(self) -> int | None:
        return field_of(*self.breakpoints, *self.translations)

    def atoms(self) -> Iterator[tuple]:
        """``(lo, hi, translation)`` per atom."""
        return zip(self.breakpoints, self.breakpoints[1:], self.translations)

    def images(self) -> list[tuple]:
        return [(lo + t, hi + t) for lo, hi, t in self.atoms()]

    def atom_index(self, x) -> int:
        if not 0 <= x < 1:
            raise OutOfDomain(f"{format_scalar(x)} is outside [0, 1)")
        return bisect_right(self.breakpoints, x) - 1

    def __call__(self, x) -> Scalar:
        x = as_scalar(x)
        return x + self.translations[self.atom_index(x)]

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_scalar(b) for b in self.breakpoints],
            "translations": [format_scalar(t) for t in self.translations],
            "field_d": self.field_d,
        }

    @classmethod
    def from_json(cls, data: dict):
        return cls(
            tuple(parse_scalar(b) for b in data["breakpoints"]),
            tuple(parse_scalar(t) for t in data["translations"]),
        )


def _tiling_witness(images: list[tuple]):
    """First overlap, else first gap, of ``images`` against [0, 1); ``None`` if they tile."""
    imgs = sorted(images)
    for lo, hi in imgs:
        if lo < 0:
            return "outside", (lo, min(hi, ZERO))
        if hi > 1:
            return "outside", (max(lo, ONE), hi)
    cur = ZERO
    for lo, hi in imgs:
        if lo < cur:
            return "overlap", (lo, min(cur, hi))
        cur = max(cur, hi)
    cur = ZERO
    for lo, hi in imgs:
        if lo > cur:
            return "gap", (cur, lo)
        cur = hi
    if cur < 1:
        return "gap", (cur, ONE)
    return None


@dataclass(frozen=True)
class Iet(PiecewiseTranslation):
    """A bijective piecewise translation of [0, 1)."""

    def _validate(self):
        w = _tiling_witness(self.images())
        if w is not None:
            kind, (lo, hi) = w
            raise NotBijective(
                f"image atoms do not tile [0, 1): {kind} on [{format_scalar(lo)}, {format_scalar(hi)})",
                witness=(kind, lo, hi),
            )

    def is_identity(self) -> bool:
        return self.r == 1


def new_iet(breakpoints, translations) -> Iet:
    return Iet(tuple(breakpoints), tuple(translations))


def rotation(gamma) -> Iet:
    """``x -> x + gamma (mod 1)`` as a two-atom IET (identity if gamma is an integer)."""
    g = as_scalar(gamma)
    g = g - floor(g)
    if g == 0:
        return Iet((ZERO, ONE), (ZERO,))
    return Iet((ZERO, 1 - g, ONE), (g, g - 1))


def from_permutation(lengths: Sequence, permutation: Sequence[int]) -> Iet:
    """IET from atom lengths (summing to 1) and the order of atoms after the exchange.

    ``permutation[i]`` is the position (0-based) of atom ``i`` in the image.
    """
    lengths = [as_scalar(x) for x in lengths]
    if sorted(permutation) != list(range(len(lengths))):
        raise BadPartition("permutation must be a rearrangement of range(r)")
    if any(x <= 0 for x in lengths) or sum(lengths, ZERO) != 1:
        raise BadPartition("lengths must be positive and sum to 1")
    starts, cur = [], ZERO
    for x in lengths:
        starts.append(cur)
        cur = cur + x
    order = sorted(range(len(lengths)), key=lambda i: permutation[i])
    image_start, cur = {}, ZERO
    for i in order:
        image_start[i] = cur
        cur = cur + lengths[i]
    return Iet(tuple(starts) + (ONE,), tuple(image_start[i] - starts[i] for i in range(len(lengths))))


def evaluate(f: PiecewiseTranslation, x) -> Scalar:
    return f(x)


def inverse(f: Iet) -> Iet:
    images = sorted((lo + t, hi + t, -t) for lo, hi, t in f.atoms())
    return Iet(tuple(lo for lo, _, _ in images) + (ONE,), tuple(t for _, _, t in images))


def compose(g: Iet, f: Iet) -> Iet:
    """The IET ``g o f``."""
    cuts, trans = [], []
    for lo, hi, t in f.atoms():
        a, b = lo + t, hi + t
        i = bisect_right(g.breakpoints, a) - 1
        start = a
        while start < b:
            end = min(g.breakpoints[i + 1], b)
            cuts.append(start - t)
            trans.append(t + g.translations[i])
            start = end
            i += 1
    return Iet(tuple(cuts) + (ONE,), tuple(trans))


def identity() -> Iet:
    return Iet((ZERO, ONE), (ZERO,))


def power(f: Iet, n: int) -> Iet:
    if n < 0:
        f, n = inverse(f), -n
    result, base = identity(), f
    while n:
        if n & 1:
            result = compose(base, result)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def transfer(f: Iet, phi: StepFn) -> StepFn:
    """Push ``phi`` forward by ``f``: the result equals ``phi o f^{-1}``."""
    pieces = []
    for lo, hi, t in f.atoms():
        pieces.extend((a + t, b + t, v) for a, b, v in phi.slice(lo, hi))
    return StepFn.from_pieces(pieces)


def birkhoff_averages(f: Iet, phi: StepFn, checkpoints: Iterable[int], *,
                      cell_budget: int = DEFAULT_CELL_BUDGET) -> Iterator[tuple[int, StepFn]]:
    """Yield ``(n, (1/n) sum_{i<n} L^i phi)`` for each checkpoint ``n`` in increasing order.

    The running sum is held as a dictionary of jumps, so adding a translate
    costs only its own cell count.
    """
    targets = sorted(set(checkpoints))
    if not targets or targets[0] < 1:
        raise ValueError("Birkhoff checkpoints must be positive")
    jumps: dict = {}
    psi = phi
    k = 0
    for n in targets:
        while k < n:
            if len(psi) > cell_budget:
                raise ResourceCap(f"iterate {k} has {len(psi)} cells", len(psi), cell_budget)
            for x, dv in psi.jumps():
                v = jumps.get(x, ZERO) + dv
                if v == 0:
                    jumps.pop(x, None)
                else:
                    jumps[x] = v
            if len(jumps) > cell_budget:
                raise ResourceCap(f"running sum has {len(jumps)} cells after {k + 1} terms",
                                  len(jumps), cell_budget)
            k += 1
            if k < targets[-1]:
                psi = transfer(f, psi)
        yield n, StepFn.from_jumps(jumps) / n


def birkhoff(f: Iet, phi: StepFn, n: int, *, cell_budget: int = DEFAULT_CELL_BUDGET) -> StepFn:
    """``(1/n) sum_{i=0}^{n-1} L_f^i phi``, exact."""
    for _, avg in birkhoff_averages(f, phi, [n], cell_budget=cell_budget):
        return avg


def boundary_orbit(f: Iet, depth: int) -> list:
    """Sorted union of ``f^{-n}(breakpoints)`` for ``0 <= n <= depth``.

    The right endpoint 1 is outside the domain and is carried along unchanged.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    g = inverse(f)
    seen = set(f.breakpoints)
    frontier = [b for b in f.breakpoints if b < 1]
    for _ in range(depth):
        frontier = [g(x) for x in frontier]
        frontier = [x for x in frontier if x not in seen]
        seen.update(frontier)
        if not frontier:
            break
    return sorted(seen)


def neighborhood(points: Iterable, delta) -> IntervalSet:
    """``[p - delta, p + delta)`` around each point, clipped to [0, 1) and merged."""
    delta = as_scalar(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    return IntervalSet.from_intervals(
        (max(ZERO, p - delta), min(ONE, p + delta)) for p in (as_scalar(q) for q in points)
    )


@dataclass(frozen=True)
class KeaneResult:
    passed: bool
    depth: int
    witness: tuple | None = None  # (i, n, j): f^n(b_i) = b_j

    def __bool__(self):
        return self.passed

    def describe(self) -> str:
        if self.passed:
            return f"no breakpoint collision up to depth {self.depth}"
        i, n, j = self.witness
        return f"f^{n}(b_{i}) = b_{j}"


def keane_check(f: Iet, depth: int) -> KeaneResult:
    """Look for ``f^n(b_i) = b_j`` with interior breakpoints and ``1 <= n <= depth``.

    A single-atom IET is the identity; it fails with witness ``(0, 1, 0)``.
    Passing is evidence of minimality, never proof.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if f.r == 1:
        return KeaneResult(False, depth, (0, 1, 0))
    interior = {b: i for i, b in enumerate(f.breakpoints) if 0 < b < 1}
    orbits = [(i, b) for b, i in interior.items()]
    for n in range(1, depth + 1):
        nxt = []
        for i, x in orbits:
            y = f(x)
            j = interior.get(y)
            if j is not None:
                return KeaneResult(False, depth, (i, n, j))
            nxt.append((i, y))
        orbits = nxt
    return KeaneResult(True, depth)


@dataclass(frozen=True)
class CyclePartition:
    """Cells ``[c_k, c_{k+1})`` permuted by the map, grouped into cycles."""

    cuts: tuple
    permutation: tuple  # cell k maps onto cell permutation[k]
    cycles: tuple  # tuples of cell indices

    def cell(self, k: int) -> tuple:
        return self.cuts[k], self.cuts[k + 1]

    def cycle_sets(self) -> list[IntervalSet]:
        return [IntervalSet.from_intervals(self.cell(k) for k in cyc) for cyc in self.cycles]

    def basis(self) -> list[StepFn]:
        """Indicators of the cycle unions; they span the invariant step densities on these cells."""
        return [StepFn.indicator_of(s) for s in self.cycle_sets()]


@dataclass(frozen=True)
class NoClosureAtDepth:
    depth: int
    points: int

    def __bool__(self):
        return False


def invariant_cycles(f: Iet, depth: int, extra_cuts: Iterable = ()):
    """Close the cut set under ``f`` and return the permutation cycles of its cells.

    Returns :class:`CyclePartition` when the forward orbit of the cuts closes
    within ``depth`` iterations, else :class:`NoClosureAtDepth`.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    cuts = set(f.breakpoints) | {as_scalar(c) for c in extra_cuts}
    if any(not 0 <= c <= 1 for c in cuts):
        raise ValueError("extra cuts must lie in [0, 1]")
    frontier = [c for c in cuts if c < 1]
    closed = False
    for _ in range(depth):
        new = {f(x) for x in frontier} - cuts
        if not new:
            closed = True
            break
        cuts |= new
        frontier = list(new)
    if not closed:
        if {f(x) for x in frontier} - cuts:
            return NoClosureAtDepth(depth, len(cuts))
    ordered = tuple(sorted(cuts))
    index = {c: k for k, c in enumerate(ordered)}
    perm = tuple(index[f(c)] for c in ordered[:-1])
    seen, cycles = set(), []
    for k in range(len(perm)):
        if k in seen:
            continue
        cyc, j = [], k
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        cycles.append(tuple(cyc))
    return CyclePartition(ordered, perm, tuple(cycles))


def project_invariant(f: Iet, phi: StepFn, depth: int, extra_cuts: Iterable = ()) -> StepFn:
    """Average ``phi`` over each cycle union of :func:`invariant_cycles`."""
    part = invariant_cycles(f, depth, extra_cuts)
    if not isinstance(part, CyclePartition):
        raise NoFinitePartition(f"cut orbit did not close within depth {depth}")
    pieces = []
    for s in part.cycle_sets():
        mass = sum((v * (b - a) for lo, hi in s for a, b, v in phi.slice(lo, hi)), ZERO)
        value = mass / s.length()
        pieces.extend((lo, hi, value) for lo, hi in s)
    return StepFn.from_pieces(pieces)


def keynes_newton(beta, gamma) -> Iet:
    """The Keynes-Newton map on [0, 1 + beta), rescaled to [0, 1).

    On the long interval, ``y -> y + 1`` for ``y < beta`` and
    ``y -> y + gamma (mod 1)`` for ``beta <= y < 1 + beta``.
    """
    beta, gamma = as_scalar(beta), as_scalar(gamma)
    if not (0 < beta < 1 and 0 < gamma < 1):
        raise BadPartition("need 0 < beta < 1 and 0 < gamma < 1")
    top = 1 + beta
    # cuts of the mod-1 wrap: y + gamma crosses an integer
    wraps = [m - gamma for m in (1, 2) if beta < m - gamma < top]
    cuts = [ZERO, beta] + wraps
    trans = [ONE] + [gamma - floor(c + gamma) for c in cuts[1:]]
    return Iet(tuple(c / top for c in cuts) + (ONE,), tuple(t / top for t in trans))


def orbit(f: Iet, x, n: int, *, backward: bool = False) -> list:
    g = inverse(f) if backward else f
    out = [as_scalar(x)]
    for _ in range(n):
        out.append(g(out[-1]))
    return out


def nomadic_gap(f: Iet, x, n: int) -> Scalar:
    """Largest circular gap of ``{f^i(x) : |i| <= n}`` in [0, 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = sorted(set(orbit(f, x, n)) | set(orbit(f, x, n, backward=True)))
    gap = pts[0] + 1 - pts[-1]
    for a, b in zip(pts, pts[1:]):
        if b - a > gap:
            gap = b - a
    return gap
