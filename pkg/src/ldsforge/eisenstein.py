"""Eisenstein-integer lattice points and their rings.

The set {a + b*w : a, b integers} with w = exp(2*pi*i/3) forms the hexagonal
lattice in the complex plane.  Its squared Euclidean norm a^2 - a*b + b^2 is
always a non-negative integer, so the "ring" of all points at one magnitude
is keyed by that integer (the squared radius) rather than by a float.  Not
every integer is representable: the smallest rings have squared radii
1, 3, 4, 7, and e.g. squared radius 2 holds no lattice point at all.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import ValidationError

#: primitive cube root of unity, w = exp(2*pi*i/3)
OMEGA = complex(np.exp(2j * np.pi / 3))


@dataclass(frozen=True, order=True)
class EisensteinInt:
    """Lattice point a + b*w with integer coefficients."""

    a: int
    b: int

    @property
    def norm_sq(self) -> int:
        """Squared magnitude |a + b*w|^2 = a^2 - a*b + b^2, exact integer."""
        return self.a * self.a - self.a * self.b + self.b * self.b

    def times_omega(self) -> "EisensteinInt":
        """Multiply by w, a 120-degree rotation that maps each ring onto itself."""
        return EisensteinInt(-self.b, self.a - self.b)


def to_complex(e: EisensteinInt) -> complex:
    """Evaluate a + b*w in double precision."""
    return e.a + e.b * OMEGA


@dataclass(frozen=True)
class Ring:
    """All lattice points at one squared radius, sorted by (a, b)."""

    radius_sq: int
    points: Tuple[EisensteinInt, ...]

    @property
    def radius(self) -> float:
        return math.sqrt(self.radius_sq)

    def __len__(self) -> int:
        return len(self.points)

    def to_complex_array(self) -> np.ndarray:
        return np.array([to_complex(p) for p in self.points], dtype=complex)


def enumerate_ring(radius_sq: int) -> Ring:
    """All (a, b) with a^2 - a*b + b^2 == radius_sq, sorted by (a, b).

    The scan covers |a|, |b| <= ceil(2*sqrt(radius_sq)), a deliberate
    over-cover of the norm form so completeness is obvious.  The result may
    be empty (e.g. radius_sq = 2); callers decide whether that is an error.
    """
    radius_sq = int(radius_sq)
    if radius_sq < 1:
        raise ValidationError(f"radius_sq must be >= 1, got {radius_sq}")
    bound = math.ceil(2 * math.sqrt(radius_sq))
    points = tuple(
        EisensteinInt(a, b)
        for a in range(-bound, bound + 1)
        for b in range(-bound, bound + 1)
        if a * a - a * b + b * b == radius_sq
    )
    return Ring(radius_sq, points)


def list_rings(max_radius_sq: int) -> List[Ring]:
    """All non-empty rings with radius_sq <= max_radius_sq, ascending."""
    max_radius_sq = int(max_radius_sq)
    if max_radius_sq < 1:
        raise ValidationError(f"max_radius_sq must be >= 1, got {max_radius_sq}")
    rings = []
    for n in range(1, max_radius_sq + 1):
        ring = enumerate_ring(n)
        if len(ring):
            rings.append(ring)
    return rings
