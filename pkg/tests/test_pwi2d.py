import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pwdyn.errors import DegenerateArrangement, ResourceCap, ValidationError
from pwdyn.pwi2d import (
    ConvexPoly,
    PolyDensity,
    PwRotation,
    RotMap,
    apply_map,
    attractor2d,
    birkhoff2d,
    clip,
    difference,
    l1_distance2d,
    pythagorean,
    rectangle,
    square,
    to_svg,
    transfer2d,
    variation2d,
)

UNIT = square(0, 0, 1)
AMBIENT = square(-1, -1, 3)


@st.composite
def pythagorean_maps(draw):
    m = draw(st.integers(1, 12))
    n = draw(st.integers(0, 12))
    c, s = pythagorean(m, n) if (m, n) != (0, 0) else (F(1), F(0))
    if draw(st.booleans()):
        c, s = -c, s
    dx = F(draw(st.integers(-8, 8)), 4)
    dy = F(draw(st.integers(-8, 8)), 4)
    return RotMap(c, s, dx, dy)


@st.composite
def convex_polys(draw, lo=-1, hi=2, den=8):
    """Rectangles, optionally with a corner cut off, inside ``[lo, hi]^2``."""
    xs = sorted(draw(st.sets(st.integers(lo * den, hi * den), min_size=2, max_size=2)))
    ys = sorted(draw(st.sets(st.integers(lo * den, hi * den), min_size=2, max_size=2)))
    x0, x1 = F(xs[0], den), F(xs[1], den)
    y0, y1 = F(ys[0], den), F(ys[1], den)
    if draw(st.booleans()):
        return ConvexPoly(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))
    return ConvexPoly(((x0, y0), (x1, y0), (x1, y1)))


@st.composite
def pw_rotations(draw):
    """Vertical strips of the unit square, each rotated about its centre."""
    cuts = sorted(draw(st.sets(st.integers(1, 7), max_size=3)))
    xs = [F(0)] + [F(c, 8) for c in cuts] + [F(1)]
    atoms, maps = [], []
    for a, b in zip(xs, xs[1:]):
        atoms.append(rectangle(a, 0, b, 1))
        c, s = pythagorean(draw(st.integers(1, 6)), draw(st.integers(0, 6)))
        maps.append(RotMap.about(c, s, ((a + b) / 2, F(1, 2))))
    return PwRotation(tuple(atoms), tuple(maps), AMBIENT)


@st.composite
def densities(draw, max_cells=3):
    cells = draw(st.lists(st.tuples(convex_polys(), st.integers(-3, 3).filter(bool)), min_size=1,
                          max_size=max_cells))
    return PolyDensity.resolved(cells)


def _inside(poly_f, x, y):
    n = len(poly_f)
    for i in range(n):
        (ax, ay), (bx, by) = poly_f[i], poly_f[(i + 1) % n]
        if (bx - ax) * (y - ay) - (by - ay) * (x - ax) <= 0:
            return False
    return True


def sampled_variation(eta: PolyDensity, samples=200) -> float:
    """Float oracle for the jump-sum using point location only.

    Each cell edge is split into ``samples`` pieces; at every midpoint the
    density is evaluated just left and right of the edge.  A point on an
    edge shared by two cells is visited from both, so its contribution is
    halved when the outer side lies in another cell.
    """
    cells = [([(float(x), float(y)) for x, y in p.vertices], float(v)) for p, v in eta.cells]

    def value(x, y):
        for poly_f, v in cells:
            if _inside(poly_f, x, y):
                return v
        return 0.0

    eps = 1e-7
    total = 0.0
    for poly_f, v in cells:
        n = len(poly_f)
        for i in range(n):
            (px, py), (qx, qy) = poly_f[i], poly_f[(i + 1) % n]
            dx, dy = qx - px, qy - py
            length = math.hypot(dx, dy)
            nx, ny = -dy / length * eps, dx / length * eps  # points into the cell
            for k in range(samples):
                t = (k + 0.5) / samples
                mx, my = px + t * dx, py + t * dy
                other = value(mx - nx, my - ny)
                weight = 1.0 if other == 0.0 else 0.5  # cell values are never zero
                total += weight * abs(value(mx + nx, my + ny) - other) * length / samples
    return total


class TestGeometry:
    def test_clip_examples(self):
        assert clip(UNIT, UNIT) == UNIT
        shifted = square(F(1, 2), 0, 1)
        assert clip(UNIT, shifted) == rectangle(F(1, 2), 0, 1, 1)
        assert clip(UNIT, square(2, 2, 1)) is None
        assert clip(UNIT, square(1, 0, 1)) is None  # shared edge only

    def test_polygon_normalization(self):
        p = ConvexPoly(((0, 1), (0, 0), (F(1, 2), 0), (1, 0), (1, 1)))
        assert p.vertices == ((0, 0), (1, 0), (1, 1), (0, 1))
        with pytest.raises(ValidationError):
            ConvexPoly(((0, 0), (1, 0), (2, 0)))
        with pytest.raises(ValidationError):
            ConvexPoly(((0, 0), (2, 0), (1, F(1, 2)), (1, 2)))

    @given(convex_polys(), convex_polys())
    def test_difference_partitions(self, p, q):
        inter = clip(p, q)
        rest = difference(p, q)
        total = sum((r.area() for r in rest), F(0)) + (inter.area() if inter else 0)
        assert total == p.area()
        assert all(clip(r, q) is None for r in rest)

    def test_apply_map_example(self):
        M = RotMap(F(3, 5), F(4, 5))
        img = apply_map(M, UNIT)
        assert set(img.vertices) == {(0, 0), (F(3, 5), F(4, 5)), (F(-1, 5), F(7, 5)), (F(-4, 5), F(3, 5))}
        assert apply_map(RotMap(), UNIT) == UNIT

    def test_rotmap_validation(self):
        with pytest.raises(ValidationError):
            RotMap(F(1, 2), F(1, 2))
        M = RotMap.about(F(3, 5), F(4, 5), (F(1, 2), F(1, 2)))
        assert M((F(1, 2), F(1, 2))) == (F(1, 2), F(1, 2))
        p = (F(1, 3), F(-2, 7))
        assert M.inverse()(M(p)) == p

    @given(pythagorean_maps(), convex_polys())
    def test_area_preserved(self, M, p):
        assert M.det() == 1
        assert apply_map(M, p).area() == p.area()


class TestTransfer:
    def test_identity_atom(self):
        f = PwRotation((UNIT,), (RotMap(),), AMBIENT)
        eta = PolyDensity.indicator(rectangle(F(-1, 2), 0, F(1, 2), 1), 3)
        assert l1_distance2d(transfer2d(f, eta), eta) == 0

    def test_centre_rotation(self):
        f = PwRotation((UNIT,), (RotMap.about(F(3, 5), F(4, 5), (F(1, 2), F(1, 2))),), AMBIENT)
        out = transfer2d(f, PolyDensity.indicator(UNIT))
        assert out.mass() == 1
        assert len(out) == 1 and out.cells[0][0] == apply_map(f.maps[0], UNIT)

    def test_cells_outside_domain_are_fixed(self):
        f = PwRotation((UNIT,), (RotMap.about(0, 1, (F(1, 2), F(1, 2))),), AMBIENT)
        outside = rectangle(-1, -1, 0, 0)
        eta = PolyDensity.indicator(outside, 5)
        assert transfer2d(f, eta).cells == eta.cells

    @given(pw_rotations(), densities())
    def test_mass_conservation(self, f, eta):
        out = transfer2d(f, eta)
        out.check_disjoint()
        assert out.mass() == eta.mass()

    @given(pw_rotations(), densities(max_cells=2), st.integers(1, 3))
    def test_birkhoff_drift(self, f, eta, n):
        avg = birkhoff2d(f, eta, n)
        assert avg.mass() == eta.mass()
        assert l1_distance2d(transfer2d(f, avg), avg) <= 2 * eta.abs_mass() / n

    def test_birkhoff_examples(self):
        f = PwRotation((UNIT,), (RotMap.about(0, 1, (F(1, 2), F(1, 2))),), AMBIENT)
        eta = PolyDensity.indicator(square(0, 0, F(1, 2)), 4)
        assert l1_distance2d(birkhoff2d(f, eta, 1), eta) == 0
        avg = birkhoff2d(f, eta, 4)  # period 4: the average is invariant
        assert l1_distance2d(transfer2d(f, avg), avg) == 0
        assert l1_distance2d(avg, PolyDensity.indicator(UNIT)) == 0

    def test_budget(self):
        f = PwRotation((UNIT,), (RotMap.about(F(3, 5), F(4, 5), (F(1, 2), F(1, 2))),), AMBIENT)
        with pytest.raises(ResourceCap):
            birkhoff2d(f, PolyDensity.indicator(UNIT), 10, cell_budget=5)


class TestVariation:
    def test_unit_square(self):
        v = variation2d(PolyDensity.indicator(UNIT))
        assert v.exact() == 4 and v.total == 4.0

    def test_two_squares(self):
        eta = PolyDensity(((UNIT, 1), (square(1, 0, 1), 3)))
        assert variation2d(eta).exact() == 14

    def test_irrational_lengths(self):
        tri = ConvexPoly(((0, 0), (1, 0), (0, 1)))
        v = variation2d(PolyDensity.indicator(tri))
        assert v.exact() is None
        assert math.isclose(v.total, 2 + math.sqrt(2))
        assert dict(v.terms) == {F(1): 2, F(2): 1}

    def test_overlap_rejected(self):
        eta = PolyDensity(((UNIT, 1), (square(F(1, 2), 0, 1), 1)))
        with pytest.raises(DegenerateArrangement):
            variation2d(eta)

    @given(densities(), st.integers(-5, 5))
    def test_homogeneous(self, eta, a):
        assert variation2d(eta.scaled(a)) == variation2d(eta).scaled(a)

    @given(densities(), densities())
    def test_triangle_inequality(self, eta, psi):
        both = PolyDensity.resolved(list(eta.cells) + list(psi.cells))
        assert variation2d(both).total <= variation2d(eta).total + variation2d(psi).total + 1e-9

    @given(densities())
    def test_matches_sampled_oracle(self, eta):
        assert math.isclose(variation2d(eta).total, sampled_variation(eta), rel_tol=5e-3, abs_tol=1e-9)


class TestAttractor:
    def test_invertible_stabilizes_at_zero(self):
        f = PwRotation((UNIT,), (RotMap.about(0, 1, (F(1, 2), F(1, 2))),), AMBIENT)
        res = attractor2d(f, 5)
        assert res.stabilized and res.depth == 0 and res.measure == 1

    def test_corner_rotation(self):
        f = PwRotation((UNIT,), (RotMap(F(99, 101), F(20, 101)),), square(-2, -2, 5))
        res = attractor2d(f, 10)
        areas = res.areas
        assert all(b <= a for a, b in zip(areas, areas[1:]))
        assert all(b < a for a, b in zip(areas[:6], areas[1:6]))

    def test_nested_images(self):
        f = PwRotation((UNIT,), (RotMap(F(99, 101), F(20, 101)),), square(-2, -2, 5))
        prev = [UNIT]
        for k in range(1, 5):
            cur = attractor2d(f, k).polys if not attractor2d(f, k).stabilized else prev
            covered = sum((q.area() for p in cur for P in prev if (q := clip(p, P)) is not None), F(0))
            assert covered == sum((p.area() for p in cur), F(0))
            prev = cur

    def test_svg(self):
        svg = to_svg([(UNIT, 1)], AMBIENT)
        assert svg.startswith("<svg") and "<polygon" in svg


def test_json_round_trip():
    f = PwRotation((UNIT,), (RotMap.about(F(3, 5), F(4, 5), (F(1, 2), F(1, 2))),), AMBIENT)
    assert PwRotation.from_json(f.to_json()) == f
    eta = PolyDensity(((UNIT, F(1, 3)),))
    assert PolyDensity.from_json(eta.to_json()) == eta
