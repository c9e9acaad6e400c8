"""Shared hypothesis strategies and fixtures."""

from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from pwdyn.iet import Iet
from pwdyn.scalar import QuadScalar, sqrt
from pwdyn.stepfn import StepFn

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

GOLDEN = (sqrt(5) - 1) / 2


def fractions(lo=-8, hi=8, max_den=12):
    return st.builds(Fraction, st.integers(lo * max_den, hi * max_den), st.integers(1, max_den))


@st.composite
def quad_scalars(draw, d=None):
    d = draw(st.sampled_from([2, 3, 5, 7])) if d is None else d
    a = draw(fractions())
    b = draw(fractions())
    return QuadScalar.make(a, b, d)


@st.composite
def unit_partitions(draw, max_atoms=5, den=24):
    """Sorted breakpoints 0 = b_0 < ... < b_r = 1 with denominator ``den``."""
    cuts = draw(st.sets(st.integers(1, den - 1), max_size=max_atoms - 1))
    return [Fraction(0)] + [Fraction(c, den) for c in sorted(cuts)] + [Fraction(1)]


@st.composite
def random_iets(draw, max_atoms=5, den=24):
    bps = draw(unit_partitions(max_atoms, den))
    lengths = [b - a for a, b in zip(bps, bps[1:])]
    perm = draw(st.permutations(range(len(lengths))))
    from pwdyn.iet import from_permutation

    return from_permutation(lengths, list(perm))


@st.composite
def step_functions(draw, max_cells=6, den=24):
    bps = draw(unit_partitions(max_cells, den))
    values = draw(st.lists(fractions(-4, 4, 6), min_size=len(bps) - 1, max_size=len(bps) - 1))
    return StepFn(tuple(bps), tuple(values))


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def half_swap():
    return Iet((Fraction(0), Fraction(1, 2), Fraction(1)), (Fraction(1, 2), Fraction(-1, 2)))


@st.composite
def random_itms(draw, max_atoms=5, den=24):
    """ITMs with every image inside [0, 1); translations share the breakpoint grid."""
    from pwdyn.itm import Itm

    bps = draw(unit_partitions(max_atoms, den))
    trans = []
    for a, b in zip(bps, bps[1:]):
        lo, hi = int(-a * den), int((1 - b) * den)
        trans.append(Fraction(draw(st.integers(lo, hi)), den))
    return Itm(tuple(bps), tuple(trans))
