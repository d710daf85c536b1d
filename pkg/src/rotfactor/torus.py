"""Exact and floating arithmetic on Z^d and on the k-torus R^k/Z^k.

Scalars are either exact rationals (``fractions.Fraction``, including
``int``) or binary64 floats.  Everything computed on the rational path is
exact: reduction mod 1, the linear maps into the torus, and squared torus
distances.  Floats are used only when an input coordinate is irrational,
with a documented equality tolerance of 1e-12.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Scalar = Union[int, Fraction, float]
Point = tuple  # lattice point: tuple of ints

FLOAT_TOL = 1e-12


def is_exact(value: Scalar) -> bool:
    return isinstance(value, (int, Fraction))


def mod1(value: Scalar) -> Scalar:
    """Reduce into [0, 1).  Exact on the rational path."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value) % 1
    reduced = value % 1.0
    # tiny negative floats round up to exactly 1.0 under %; keep [0, 1)
    return 0.0 if reduced >= 1.0 else reduced


def scalar_to_str(value: Scalar) -> str:
    """Rationals as 'p/q' in lowest terms (sign on the numerator),
    floats as shortest round-trip decimal."""
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    return repr(float(value))


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_scalar(text: str) -> Scalar:
    """Inverse of scalar_to_str; 'p/q' and integer literals parse exactly."""
    text = text.strip()
    if _RATIONAL_RE.match(text):
        return Fraction(text)
    return float(text)


def _check_dims(theta: Sequence[Scalar], p: Sequence[int]) -> None:
    if len(theta) != len(p):
        raise ValueError(
            f"dimension mismatch: theta has {len(theta)} components, "
            f"point has {len(p)}"
        )


@dataclass(frozen=True)
class TorusPoint:
    """A point of T^k with components reduced into [0, 1)."""

    components: tuple

    @classmethod
    def reduce(cls, values: Sequence[Scalar]) -> "TorusPoint":
        return cls(tuple(mod1(v) for v in values))

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.components)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        if self.k != other.k:
            raise ValueError("dimension mismatch in torus addition")
        return TorusPoint.reduce(
            tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __neg__(self) -> "TorusPoint":
        return TorusPoint.reduce(tuple(-v for v in self.components))

    def is_zero(self, tol: float = FLOAT_TOL) -> bool:
        return all(
            v == 0 if is_exact(v) else min(v, 1.0 - v) <= tol
            for v in self.components
        )

    def to_strings(self) -> tuple:
        return tuple(scalar_to_str(v) for v in self.components)


def c_map_1(theta: Sequence[Scalar], p: Sequence[int]) -> TorusPoint:
    """<theta, p> mod Z: the inner product pushed to the 1-torus."""
    _check_dims(theta, p)
    return TorusPoint.reduce((sum(t * n for t, n in zip(theta, p)),))


def c_map_d(theta: Sequence[Scalar], p: Sequence[int]) -> TorusPoint:
    """[theta, p] mod Z^d: the coordinatewise product pushed to T^d."""
    _check_dims(theta, p)
    return TorusPoint.reduce(tuple(t * n for t, n in zip(theta, p)))


def c_map(theta: Sequence[Scalar], p: Sequence[int], k: int) -> TorusPoint:
    """Dispatch on torus dimension: k == 1 gives the inner-product map,
    k == len(theta) the coordinatewise map."""
    if k == 1:
        return c_map_1(theta, p)
    if k == len(theta):
        return c_map_d(theta, p)
    raise ValueError(f"k must be 1 or {len(theta)}, got {k}")


def torus_distance_sq(t: TorusPoint) -> Scalar:
    """Squared Euclidean distance to 0 on T^k; a Fraction when exact."""
    total: Scalar = Fraction(0) if t.exact else 0.0
    for v in t.components:
        m = min(v, 1 - v)
        total += m * m
    return total


def torus_distance(t: TorusPoint) -> float:
    """Euclidean distance to 0 on the k-torus (min-image metric)."""
    return math.sqrt(torus_distance_sq(t))
