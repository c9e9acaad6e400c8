from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given

from conftest import GOLDEN, random_iets, random_itms
from pwdyn.config import load_config
from pwdyn.errors import BadPartition, NotStabilized, NullAttractor, ResourceCap, Stabilized
from pwdyn.iet import Iet, rotation
from pwdyn.intervals import IntervalSet
from pwdyn.itm import (
    Itm,
    attractor,
    box_count,
    box_count_dimension,
    box_dim_estimate,
    image_iterate,
    image_iterates,
    reduce_to_fplus,
)
from pwdyn.stepfn import StepFn

FINITE = Itm((F(0), F(2, 3), F(5, 6), F(1)), (F(1, 3), F(-2, 3), F(0)))


def one_step_oracle(T: Itm, s: IntervalSet) -> IntervalSet:
    """Image of ``s`` computed by pointwise mapping of a fine grid of cells.

    Every breakpoint of ``T`` and endpoint of ``s`` lies on the grid, so the
    image of each grid cell is a translate and the union is exact.
    """
    den = 1
    for x in list(T.breakpoints) + list(T.translations) + [e for iv in s for e in iv]:
        den = den * x.denominator // __import__("math").gcd(den, x.denominator)
    cells = []
    for k in range(den):
        x = F(k, den)
        if s.contains(x):
            y = T(x)
            cells.append((y, y + F(1, den)))
    return IntervalSet.from_intervals(cells)


def test_rejects_escaping_image():
    with pytest.raises(BadPartition):
        Itm((F(0), F(1, 2), F(1)), (F(2, 3), F(0)))


def test_image_iterate_examples():
    T = Itm((F(0), F(1, 2), F(1)), (F(1, 3), F(-1, 2)))
    assert image_iterate(T, 0) == IntervalSet.unit()
    assert image_iterate(T, 1) == IntervalSet.from_intervals([(0, F(5, 6))])
    assert image_iterate(Itm.from_iet(rotation(GOLDEN)), 7) == IntervalSet.unit()
    with pytest.raises(ValueError):
        image_iterate(T, -1)


@given(random_itms())
def test_push_matches_grid_oracle(T):
    s = IntervalSet.unit()
    for _ in range(3):
        nxt = T.push(s)
        assert nxt == one_step_oracle(T, s)
        s = nxt


@given(random_itms())
def test_nesting_and_monotone_length(T):
    prev = None
    for n, s in enumerate(image_iterates(T)):
        if prev is not None:
            assert s.issubset(prev)
            assert s.length() <= prev.length()
        prev = s
        if n == 30:
            break


@given(random_itms())
def test_rational_itms_stabilize(T):
    res = attractor(T, 200)
    assert res.stabilized
    for k in range(1, 6):
        assert image_iterate(T, res.depth + k) == res.set
    g = reduce_to_fplus(T, 200)
    assert isinstance(g, Iet)
    assert g.r <= sum(1 for _ in res.set) * T.r


def test_finite_type_fixture():
    assert image_iterate(FINITE, 2) == image_iterate(FINITE, 3)
    res = attractor(FINITE, 20)
    assert res.stabilized and res.depth == 2
    assert res.set == IntervalSet.from_intervals([(0, F(1, 6)), (F(1, 3), F(1, 2)), (F(2, 3), 1)])
    assert res.lengths == (1, F(5, 6), F(2, 3))
    g = reduce_to_fplus(FINITE, 20)
    assert g == Iet((F(0), F(1, 2), F(3, 4), F(1)), (F(1, 4), F(-1, 2), F(0)))
    # Lebesgue on the renormalized attractor is invariant
    from pwdyn.iet import transfer

    assert transfer(g, StepFn.constant(1)) == StepFn.constant(1)


def test_finite_type_config_matches():
    cfg = load_config("configs/finite_itm.json")
    assert cfg.map == FINITE


@given(random_iets())
def test_iet_input(f):
    T = Itm.from_iet(f)
    res = attractor(T, 3)
    assert res.stabilized and res.depth == 0 and res.measure == 1
    assert reduce_to_fplus(T, 3) == f
    with pytest.raises(Stabilized):
        box_dim_estimate(T, 5, [2, 3, 4])


class TestNullAttractor:
    """Rational approximant of the self-similar heptagonal ITM.

    The limiting map has cubic parameters ``p = 4 sin^2(pi/14)`` and
    ``q = 2 cos(3 pi/7)`` with ``T = x + 1 - p`` on ``[0, p)``, ``x - p`` on
    ``[p, q)`` and ``x - q`` on ``[q, 1)``; its images shrink to a Cantor set.
    Decay is polynomial in the depth, so the fixture carries an explicit
    resolution.
    """

    cfg = load_config("configs/null_itm.json")

    def test_raises(self):
        with pytest.raises(NullAttractor):
            reduce_to_fplus(self.cfg.map, self.cfg.depth, null_tolerance=self.cfg.null_tolerance)

    def test_evidence(self):
        res = attractor(self.cfg.map, 200)
        assert not res.stabilized
        assert all(b < a for a, b in zip(res.lengths, res.lengths[1:]))
        assert len(res.set) == 201  # one new gap per step

    def test_default_resolution_is_not_stabilized(self):
        with pytest.raises(NotStabilized):
            reduce_to_fplus(self.cfg.map, 50)


def _mp(x):
    if isinstance(x, F):
        return mpmath.mpf(x.numerator) / x.denominator
    return _mp(x.a) + _mp(x.b) * mpmath.sqrt(x.d)


class TestGoldenInfiniteType:
    """ITM with golden-field parameters whose images never stabilize.

    Lengths are checked against an independent 50-digit float push of the
    interval lists, which shares no code with the exact image routine.
    """

    cfg = load_config("configs/golden_itm.json")

    @staticmethod
    def float_lengths(T, depth):
        with mpmath.workdps(50):
            bps = [_mp(b) for b in T.breakpoints]
            trs = [_mp(t) for t in T.translations]
            cur = [(bps[0], bps[-1])]
            out = [sum(b - a for a, b in cur)]
            for _ in range(depth):
                pieces = []
                for a, b in cur:
                    for lo, hi, t in zip(bps, bps[1:], trs):
                        x, y = max(a, lo), min(b, hi)
                        if y > x:
                            pieces.append((x + t, y + t))
                pieces.sort()
                merged = [list(pieces[0])]
                for a, b in pieces[1:]:
                    if a <= merged[-1][1] + mpmath.mpf(10) ** -40:
                        merged[-1][1] = max(merged[-1][1], b)
                    else:
                        merged.append([a, b])
                cur = [tuple(m) for m in merged]
                out.append(sum(b - a for a, b in cur))
            return out

    def test_truncated_with_decreasing_lengths(self):
        res = attractor(self.cfg.map, 150)
        assert not res.stabilized and res.depth == 150
        assert all(b < a for a, b in zip(res.lengths, res.lengths[1:]))

    def test_lengths_match_float_oracle(self):
        res = attractor(self.cfg.map, 60)
        oracle = self.float_lengths(self.cfg.map, 60)
        for exact, approx in zip(res.lengths, oracle):
            assert abs(float(exact) - float(approx)) < 1e-12

    def test_box_dimension_in_unit_interval(self):
        dim = box_dim_estimate(self.cfg.map, self.cfg.depth, self.cfg.box_exponents)
        assert 0 < dim < 1


def test_budget():
    with pytest.raises(ResourceCap):
        attractor(load_config("configs/null_itm.json").map, 100, budget=20)


class TestBoxCount:
    def test_fat_interval(self):
        s = IntervalSet.from_intervals([(0, F(1, 2))])
        assert box_count(s, 3) == 4
        assert abs(box_count_dimension(s, range(2, 13)) - 1.0) < 0.05

    def test_count_shares_cells(self):
        s = IntervalSet.from_intervals([(0, F(1, 3)), (F(1, 3) + F(1, 100), F(1, 2))])
        assert box_count(s, 2) == 2

    def test_needs_two_scales(self):
        with pytest.raises(ValueError):
            box_count_dimension(IntervalSet.unit(), [3])
