"""Planar piecewise rotations with exact rational geometry.

Every rotation matrix has rational entries ``(c, -s; s, c)`` with
``c^2 + s^2 = 1`` (a Pythagorean triple), so polygon vertices stay rational
under every operation and no tolerance is ever needed.

Polygons are convex and stored counter-clockwise.  A :class:`PwRotation`
acts on ``X`` (the union of its atoms) and fixes ``ambient \\ X``; points
that a rotation carries outside ``X`` stay in ``ambient``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateArrangement, ResourceCap, ValidationError
from .scalar import as_scalar, format_scalar, parse_scalar, to_float

__all__ = [
    "ConvexPoly",
    "RotMap",
    "PwRotation",
    "PolyDensity",
    "Variation2D",
    "Attractor2DResult",
    "area",
    "clip",
    "difference",
    "apply_map",
    "transfer2d",
    "variation2d",
    "birkhoff2d",
    "l1_distance2d",
    "attractor2d",
    "pythagorean",
    "square",
    "to_svg",
    "DEFAULT_CELL_BUDGET_2D",
]

ZERO = Fraction(0)
ONE = Fraction(1)
DEFAULT_CELL_BUDGET_2D = 10**5

Point = tuple  # (Fraction, Fraction)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _signed_area2(vs) -> Fraction:
    n = len(vs)
    return sum((vs[i][0] * vs[(i + 1) % n][1] - vs[(i + 1) % n][0] * vs[i][1] for i in range(n)), ZERO)


def _clean(vertices) -> tuple | None:
    """CCW, duplicate- and collinear-free vertex tuple, or ``None`` if degenerate."""
    vs = []
    for v in vertices:
        p = (Fraction(v[0]), Fraction(v[1]))
        if not vs or vs[-1] != p:
            vs.append(p)
    while len(vs) > 1 and vs[0] == vs[-1]:
        vs.pop()
    changed = True
    while changed and len(vs) >= 3:
        changed = False
        for i in range(len(vs)):
            if _cross(vs[i - 1], vs[i], vs[(i + 1) % len(vs)]) == 0:
                del vs[i]
                changed = True
                break
    if len(vs) < 3:
        return None
    a2 = _signed_area2(vs)
    if a2 == 0:
        return None
    if a2 < 0:
        vs.reverse()
    k = vs.index(min(vs))
    return tuple(vs[k:] + vs[:k])


@dataclass(frozen=True)
class ConvexPoly:
    vertices: tuple

    def __post_init__(self):
        vs = _clean(self.vertices)
        if vs is None:
            raise ValidationError("polygon has zero area")
        n = len(vs)
        for i in range(n):
            if _cross(vs[i - 1], vs[i], vs[(i + 1) % n]) < 0:
                raise ValidationError("polygon is not convex")
        object.__setattr__(self, "vertices", vs)

    @classmethod
    def make(cls, vertices) -> "ConvexPoly | None":
        """Like the constructor but returns ``None`` for degenerate input."""
        vs = _clean(vertices)
        if vs is None:
            return None
        obj = object.__new__(cls)
        object.__setattr__(obj, "vertices", vs)
        return obj

    def area(self) -> Fraction:
        return _signed_area2(self.vertices) / 2

    def edges(self):
        vs = self.vertices
        return zip(vs, vs[1:] + vs[:1])

    def bbox(self):
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def contains_point(self, p) -> bool:
        """Closed containment."""
        return all(_cross(a, b, p) >= 0 for a, b in self.edges())

    def contains(self, other: "ConvexPoly") -> bool:
        return all(self.contains_point(v) for v in other.vertices)

    def centroid(self):
        a2 = _signed_area2(self.vertices)
        cx = cy = ZERO
        for p, q in self.edges():
            w = p[0] * q[1] - q[0] * p[1]
            cx += (p[0] + q[0]) * w
            cy += (p[1] + q[1]) * w
        return cx / (3 * a2), cy / (3 * a2)

    def to_json(self) -> list:
        return [[format_scalar(x), format_scalar(y)] for x, y in self.vertices]

    @classmethod
    def from_json(cls, data) -> "ConvexPoly":
        return cls(tuple((parse_scalar(x), parse_scalar(y)) for x, y in data))


def square(x0, y0, side) -> ConvexPoly:
    x0, y0, side = Fraction(x0), Fraction(y0), Fraction(side)
    return ConvexPoly(((x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)))


def rectangle(x0, y0, x1, y1) -> ConvexPoly:
    x0, y0, x1, y1 = map(Fraction, (x0, y0, x1, y1))
    return ConvexPoly(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


def area(p: ConvexPoly) -> Fraction:
    return p.area()


def _bbox_disjoint(p: ConvexPoly, q: ConvexPoly) -> bool:
    a, b = p.bbox(), q.bbox()
    return a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1]


def _clip_halfplane(vs: list, a, b, keep_left: bool = True) -> list:
    """Part of polygon ``vs`` on the closed left (or right) of the directed line ``a -> b``."""
    out = []
    n = len(vs)
    sgn = 1 if keep_left else -1
    for i in range(n):
        p, q = vs[i], vs[(i + 1) % n]
        cp = sgn * _cross(a, b, p)
        cq = sgn * _cross(a, b, q)
        if cp >= 0:
            out.append(p)
        if (cp > 0 > cq) or (cp < 0 < cq):
            t = cp / (cp - cq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def clip(p: ConvexPoly, q: ConvexPoly) -> ConvexPoly | None:
    """Exact intersection of two convex polygons; ``None`` if it has no interior."""
    if _bbox_disjoint(p, q):
        return None
    vs = list(p.vertices)
    for a, b in q.edges():
        vs = _clip_halfplane(vs, a, b)
        if len(vs) < 3:
            return None
    return ConvexPoly.make(vs)


def difference(p: ConvexPoly, q: ConvexPoly) -> list[ConvexPoly]:
    """``p`` minus ``q`` as interior-disjoint convex pieces."""
    if clip(p, q) is None:
        return [p]
    pieces = []
    rest = list(p.vertices)
    for a, b in q.edges():
        outside = ConvexPoly.make(_clip_halfplane(rest, a, b, keep_left=False))
        if outside is not None:
            pieces.append(outside)
        rest = _clip_halfplane(rest, a, b)
        if len(rest) < 3:
            break
    return pieces


def _subtract_all(pieces: list, others: Iterable[ConvexPoly]) -> list:
    for e in others:
        if not pieces:
            break
        pieces = [r for piece in pieces for r in difference(piece, e)]
    return pieces


@dataclass(frozen=True)
class RotMap:
    """``x -> R x + offset`` with ``R = (c, -s; s, c)`` and ``c^2 + s^2 = 1``."""

    c: Fraction = ONE
    s: Fraction = ZERO
    ox: Fraction = ZERO
    oy: Fraction = ZERO

    def __post_init__(self):
        for name in ("c", "s", "ox", "oy"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.c * self.c + self.s * self.s != 1:
            raise ValidationError(f"c^2 + s^2 != 1 for c={self.c}, s={self.s}")

    @classmethod
    def about(cls, c, s, center) -> "RotMap":
        """Rotation by ``(c, s)`` fixing ``center``."""
        c, s = Fraction(c), Fraction(s)
        px, py = Fraction(center[0]), Fraction(center[1])
        return cls(c, s, px - (c * px - s * py), py - (s * px + c * py))

    @classmethod
    def translation(cls, dx, dy) -> "RotMap":
        return cls(ONE, ZERO, dx, dy)

    def det(self) -> Fraction:
        return self.c * self.c + self.s * self.s

    def __call__(self, p) -> Point:
        x, y = p
        return (self.c * x - self.s * y + self.ox, self.s * x + self.c * y + self.oy)

    def inverse(self) -> "RotMap":
        c, s = self.c, -self.s
        return RotMap(c, s, -(c * self.ox - s * self.oy), -(s * self.ox + c * self.oy))

    def to_json(self) -> dict:
        return {"c": format_scalar(self.c), "s": format_scalar(self.s),
                "offset": [format_scalar(self.ox), format_scalar(self.oy)]}

    @classmethod
    def from_json(cls, data) -> "RotMap":
        ox, oy = data.get("offset", ["0", "0"])
        return cls(parse_scalar(data["c"]), parse_scalar(data["s"]), parse_scalar(ox), parse_scalar(oy))


def pythagorean(m: int, n: int) -> tuple[Fraction, Fraction]:
    """``(c, s) = ((m^2 - n^2), 2mn) / (m^2 + n^2)``."""
    h = m * m + n * n
    return Fraction(m * m - n * n, h), Fraction(2 * m * n, h)


def apply_map(M: RotMap, p: ConvexPoly) -> ConvexPoly:
    # rotations keep orientation, so the image is already CCW and convex
    return ConvexPoly.make([M(v) for v in p.vertices])


@dataclass(frozen=True)
class PwRotation:
    atoms: tuple
    maps: tuple
    ambient: ConvexPoly

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.atoms) != len(self.maps) or not self.atoms:
            raise ValidationError("need one map per atom and at least one atom")
        for i, a in enumerate(self.atoms):
            for b in self.atoms[i + 1:]:
                if clip(a, b) is not None:
                    raise ValidationError("atoms overlap")
            if not self.ambient.contains(a):
                raise ValidationError(f"atom {i} is not inside the ambient square")
        for i, img in enumerate(self.images()):
            if not self.ambient.contains(img):
                raise ValidationError(f"image of atom {i} leaves the ambient square")

    def images(self) -> list[ConvexPoly]:
        return [apply_map(M, a) for a, M in zip(self.atoms, self.maps)]

    def domain_area(self) -> Fraction:
        return sum((a.area() for a in self.atoms), ZERO)

    def is_invertible(self) -> bool:
        """True when the images tile ``X`` up to measure zero."""
        imgs = self.images()
        for i, a in enumerate(imgs):
            for b in imgs[i + 1:]:
                if clip(a, b) is not None:
                    return False
        for img in imgs:
            covered = sum((q.area() for A in self.atoms if (q := clip(img, A)) is not None), ZERO)
            if covered != img.area():
                return False
        return True

    def to_json(self) -> dict:
        return {
            "atoms": [a.to_json() for a in self.atoms],
            "maps": [M.to_json() for M in self.maps],
            "ambient": self.ambient.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "PwRotation":
        return cls(
            tuple(ConvexPoly.from_json(a) for a in data["atoms"]),
            tuple(RotMap.from_json(m) for m in data["maps"]),
            ConvexPoly.from_json(data["ambient"]),
        )


def _insert(cells: list, poly: ConvexPoly, value) -> list:
    """Add ``value * chi_poly`` to an interior-disjoint arrangement."""
    out, rest = [], [poly]
    for e, w in cells:
        inter = clip(e, poly)
        if inter is None:
            out.append((e, w))
            continue
        if w + value != 0:
            out.append((inter, w + value))
        out.extend((r, w) for r in difference(e, poly))
        rest = [r for piece in rest for r in difference(piece, e)]
    out.extend((r, value) for r in rest)
    return out


@dataclass(frozen=True)
class PolyDensity:
    """Piecewise-constant density: ``(polygon, value)`` cells, zero elsewhere."""

    cells: tuple = ()

    def __post_init__(self):
        cells = tuple((p, as_scalar(v)) for p, v in self.cells if v != 0)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def indicator(cls, poly: ConvexPoly, value=1) -> "PolyDensity":
        return cls(((poly, value),))

    @classmethod
    def resolved(cls, cells: Iterable[tuple], budget: int = DEFAULT_CELL_BUDGET_2D) -> "PolyDensity":
        """Sum possibly overlapping cells into an interior-disjoint arrangement."""
        acc: list = []
        for p, v in cells:
            if v == 0:
                continue
            acc = _insert(acc, p, as_scalar(v))
            if len(acc) > budget:
                raise ResourceCap(f"arrangement has {len(acc)} cells", len(acc), budget)
        return cls(tuple(acc))

    def __len__(self):
        return len(self.cells)

    def mass(self):
        return sum((v * p.area() for p, v in self.cells), ZERO)

    def abs_mass(self):
        return sum((abs(v) * p.area() for p, v in self.cells), ZERO)

    def scaled(self, alpha) -> "PolyDensity":
        alpha = as_scalar(alpha)
        return PolyDensity(tuple((p, v * alpha) for p, v in self.cells))

    def check_disjoint(self) -> None:
        cells = self.cells
        for i, (p, _) in enumerate(cells):
            for q, _ in cells[i + 1:]:
                if clip(p, q) is not None:
                    raise DegenerateArrangement("two cells overlap with positive area")

    def to_json(self) -> list:
        return [{"polygon": p.to_json(), "value": format_scalar(v)} for p, v in self.cells]

    @classmethod
    def from_json(cls, data) -> "PolyDensity":
        return cls(tuple((ConvexPoly.from_json(c["polygon"]), parse_scalar(c["value"])) for c in data))


def transfer2d(F: PwRotation, eta: PolyDensity, *, cell_budget: int = DEFAULT_CELL_BUDGET_2D) -> PolyDensity:
    """Pushforward of ``eta`` by ``F`` extended as the identity off ``X``."""
    pieces = []
    for p, v in eta.cells:
        for atom, M in zip(F.atoms, F.maps):
            q = clip(p, atom)
            if q is not None:
                pieces.append((apply_map(M, q), v))
        pieces.extend((r, v) for r in _subtract_all([p], F.atoms))
    if len(pieces) > cell_budget:
        raise ResourceCap(f"pushforward has {len(pieces)} cells", len(pieces), cell_budget)
    return PolyDensity.resolved(pieces, cell_budget)


def birkhoff2d(F: PwRotation, eta: PolyDensity, n: int, *,
               cell_budget: int = DEFAULT_CELL_BUDGET_2D) -> PolyDensity:
    """``(1/n) sum_{i<n} L^i eta`` as one interior-disjoint arrangement."""
    if n < 1:
        raise ValueError("n must be >= 1")
    weight = Fraction(1, n)
    acc: list = []
    cur = eta
    for i in range(n):
        for p, v in cur.cells:
            acc = _insert(acc, p, v * weight)
        if len(acc) > cell_budget:
            raise ResourceCap(f"average has {len(acc)} cells", len(acc), cell_budget)
        if i + 1 < n:
            cur = transfer2d(F, cur, cell_budget=cell_budget)
    return PolyDensity(tuple(acc))


def l1_distance2d(eta: PolyDensity, psi: PolyDensity) -> Fraction:
    diff = PolyDensity.resolved(list(eta.cells) + [(p, -v) for p, v in psi.cells], budget=10**9)
    return diff.abs_mass()


@dataclass(frozen=True)
class Variation2D:
    """Jump-sum ``sum_k jump_k * sqrt(sq_len_k)``, grouped by squared length."""

    terms: tuple  # ((sq_len, jump_total), ...) sorted by sq_len

    @property
    def total(self) -> float:
        return math.fsum(to_float(j) * math.sqrt(to_float(s)) for s, j in self.terms)

    def exact(self):
        """Exact value when every squared length is a rational square, else ``None``."""
        acc = ZERO
        for s, j in self.terms:
            r = _rational_sqrt(s)
            if r is None:
                return None
            acc += j * r
        return acc

    def scaled(self, alpha) -> "Variation2D":
        a = abs(as_scalar(alpha))
        return Variation2D(tuple((s, j * a) for s, j in self.terms if j * a != 0))


def _rational_sqrt(q: Fraction):
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _line_key(p, q):
    """Canonical ``(a, b, c)`` for ``a x + b y = c`` plus the edge's orientation sign."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    a, b = -dy, dx
    lead = a if a != 0 else b
    sign = 1 if lead > 0 else -1
    a, b = a / lead, b / lead
    return (a, b, a * p[0] + b * p[1]), sign


def variation2d(eta: PolyDensity, *, check: bool = True) -> Variation2D:
    """Total variation of a piecewise-constant density over the plane.

    Edges are grouped by supporting line; along each line the values on the
    two sides are summed over elementary segments and ``|left - right|``
    times the segment length is accumulated.
    """
    if check:
        eta.check_disjoint()
    lines: dict = {}
    for poly, v in eta.cells:
        for p, q in poly.edges():
            key, sign = _line_key(p, q)
            a, b, _ = key
            # parameter along the canonical direction (-b, a)
            tp, tq = -b * p[0] + a * p[1], -b * q[0] + a * q[1]
            lo, hi = (tp, tq) if tp < tq else (tq, tp)
            # cells on opposite sides of a shared edge traverse it in opposite directions
            lines.setdefault(key, []).append((lo, hi, sign > 0, v))
    terms: dict = {}
    for (a, b, _), segs in lines.items():
        norm2 = a * a + b * b
        ts = sorted({t for lo, hi, _, _ in segs for t in (lo, hi)})
        for t0, t1 in zip(ts, ts[1:]):
            left = right = ZERO
            nl = nr = 0
            for lo, hi, positive_side, v in segs:
                if lo <= t0 and t1 <= hi:
                    if positive_side:
                        left += v
                        nl += 1
                    else:
                        right += v
                        nr += 1
            if nl > 1 or nr > 1:
                raise DegenerateArrangement("overlapping cells share an edge side")
            jump = abs(left - right)
            if jump:
                s = (t1 - t0) ** 2 / norm2
                terms[s] = terms.get(s, ZERO) + jump
    return Variation2D(tuple(sorted(terms.items())))


@dataclass(frozen=True)
class Attractor2DResult:
    stabilized: bool
    polys: tuple
    depth: int
    areas: tuple  # exact areas of X_0 .. X_depth

    @property
    def measure(self):
        return sum((p.area() for p in self.polys), ZERO)


def _image_within_domain(F: PwRotation, polys: Sequence[ConvexPoly], budget: int) -> list:
    out: list = []
    for P in polys:
        for atom, M in zip(F.atoms, F.maps):
            q = clip(P, atom)
            if q is None:
                continue
            img = apply_map(M, q)
            for A in F.atoms:
                piece = clip(img, A)
                if piece is None:
                    continue
                out.extend(_subtract_all([piece], out))
                if len(out) > budget:
                    raise ResourceCap(f"image set has {len(out)} polygons", len(out), budget)
    return out


def attractor2d(F: PwRotation, max_depth: int, *, budget: int = DEFAULT_CELL_BUDGET_2D) -> Attractor2DResult:
    """Iterate ``X_{n+1} = F(X_n) intersected with X`` until the area stops changing.

    The sets are nested, so equal consecutive areas mean equal sets up to
    measure zero.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    cur = list(F.atoms)
    areas = [F.domain_area()]
    for k in range(max_depth):
        nxt = _image_within_domain(F, cur, budget)
        a = sum((p.area() for p in nxt), ZERO)
        if a == areas[-1]:
            return Attractor2DResult(True, tuple(cur), k, tuple(areas))
        areas.append(a)
        cur = nxt
    return Attractor2DResult(False, tuple(cur), max_depth, tuple(areas))


def polyset_to_json(polys: Iterable[ConvexPoly]) -> list:
    return [p.to_json() for p in polys]


def polyset_from_json(data) -> list[ConvexPoly]:
    return [ConvexPoly.from_json(p) for p in data]


def to_svg(cells: Iterable[tuple], frame: ConvexPoly, size: int = 400) -> str:
    """SVG of ``(polygon, value)`` pairs shaded by value inside ``frame``'s bounding box."""
    x0, y0, x1, y1 = (to_float(t) for t in frame.bbox())
    cells = list(cells)
    vmax = max((abs(to_float(v)) for _, v in cells), default=1.0) or 1.0
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white" stroke="black"/>']
    for poly, v in cells:
        pts = " ".join(f"{(to_float(x) - x0) * sx:.3f},{(y1 - to_float(y)) * sy:.3f}" for x, y in poly.vertices)
        shade = int(255 * (1 - abs(to_float(v)) / vmax))
        parts.append(f'<polygon points="{pts}" fill="rgb({shade},{shade},255)" stroke="black" stroke-width="0.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
