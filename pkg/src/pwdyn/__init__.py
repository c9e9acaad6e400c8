"""Exact dynamics of piecewise isometries.

Interval exchanges and interval translation maps over the rationals and
real quadratic fields, piecewise rational rotations of the plane, transfer
operators on step densities, Birkhoff averages and attractors.
"""

from .errors import (
    BadPartition,
    DegenerateArrangement,
    NoFinitePartition,
    NotBijective,
    NotStabilized,
    NullAttractor,
    OutOfDomain,
    PwdynError,
    ResourceCap,
    Stabilized,
    ValidationError,
)
from .iet import Iet, birkhoff, compose, inverse, keane_check, keynes_newton, rotation, transfer
from .intervals import IntervalSet
from .itm import Itm, attractor, reduce_to_fplus
from .pwi2d import ConvexPoly, PolyDensity, PwRotation, RotMap
from .scalar import QuadScalar, format_scalar, parse_scalar
from .stepfn import StepFn

__version__ = "0.1.0"
