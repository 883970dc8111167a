"""Lattice regions used to confine, discount or splice weight fields.

Regions are small immutable predicate trees over lattice points.  Every
region can be evaluated three ways: on a single point (``contains``), on
coordinate arrays (``mask``), and as a flat postfix program consumed by the
compiled passage kernels (``program``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

# Sentinel for an unbounded side; far outside the coordinate guard.
UNBOUNDED = 2**62

OP_RECT, OP_BOX, OP_NOT, OP_AND, OP_OR = 0, 1, 2, 3, 4
MAX_STACK = 32


def _clip(lo, hi):
    return max(lo, -UNBOUNDED), min(hi, UNBOUNDED)


class Region:
    """Base class; subclasses implement the four evaluation hooks."""

    def contains(self, p) -> bool:
        x, y = int(p[0]), int(p[1])
        return bool(self.mask(np.array([x]), np.array([y]))[0])

    def __contains__(self, p):
        return self.contains(p)

    def mask(self, xs, ys):
        raise NotImplementedError

    def program(self) -> list:
        raise NotImplementedError

    def bounds(self) -> Tuple[int, int, int, int]:
        """Conservative ``(phi_lo, phi_hi, psi_lo, psi_hi)`` hull."""
        return (-UNBOUNDED, UNBOUNDED, -UNBOUNDED, UNBOUNDED)

    def compiled(self) -> np.ndarray:
        rows = self.program()
        depth = peak = 0
        for row in rows:
            depth += 1 if row[0] in (OP_RECT, OP_BOX) else (0 if row[0] == OP_NOT else -1)
            peak = max(peak, depth)
        if peak > MAX_STACK:
            raise ValueError(f"region nests too deeply ({peak} > {MAX_STACK})")
        return np.asarray(rows, dtype=np.int64).reshape(-1, 5)

    def __and__(self, other):
        return Intersection((self, other))

    def __or__(self, other):
        return Union((self, other))

    def __invert__(self):
        return Complement(self)


@dataclass(frozen=True)
class Rectangle(Region):
    """Closed box in (phi, psi) coordinates: phi = x + y, psi = y - x."""

    phi_lo: int = -UNBOUNDED
    phi_hi: int = UNBOUNDED
    psi_lo: int = -UNBOUNDED
    psi_hi: int = UNBOUNDED

    def mask(self, xs, ys):
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        phi, psi = xs + ys, ys - xs
        return (phi >= self.phi_lo) & (phi <= self.phi_hi) & (psi >= self.psi_lo) & (psi <= self.psi_hi)

    def program(self):
        return [[OP_RECT, *_clip(self.phi_lo, self.phi_hi), *_clip(self.psi_lo, self.psi_hi)]]

    def bounds(self):
        return (self.phi_lo, self.phi_hi, self.psi_lo, self.psi_hi)

    @property
    def is_empty(self):
        return self.phi_lo > self.phi_hi or self.psi_lo > self.psi_hi


@dataclass(frozen=True)
class HalfPlaneBand(Region):
    """Points with ``psi <= psi_max`` and ``0 <= phi <= phi_max``."""

    psi_max: int
    phi_max: int

    def mask(self, xs, ys):
        return self.as_rectangle().mask(xs, ys)

    def as_rectangle(self):
        return Rectangle(0, self.phi_max, -UNBOUNDED, self.psi_max)

    def program(self):
        return self.as_rectangle().program()

    def bounds(self):
        return self.as_rectangle().bounds()


@dataclass(frozen=True)
class AxisBox(Region):
    """Closed box in ordinary (x, y) coordinates."""

    x_lo: int = -UNBOUNDED
    x_hi: int = UNBOUNDED
    y_lo: int = -UNBOUNDED
    y_hi: int = UNBOUNDED

    def mask(self, xs, ys):
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        return (xs >= self.x_lo) & (xs <= self.x_hi) & (ys >= self.y_lo) & (ys <= self.y_hi)

    def program(self):
        return [[OP_BOX, *_clip(self.x_lo, self.x_hi), *_clip(self.y_lo, self.y_hi)]]

    def bounds(self):
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            return (1, 0, 1, 0)
        return _hull_sum(self.x_lo, self.x_hi, self.y_lo, self.y_hi)


def _hull_sum(x_lo, x_hi, y_lo, y_hi):
    big = UNBOUNDED
    phi_lo = -big if min(x_lo, y_lo) <= -big else x_lo + y_lo
    phi_hi = big if max(x_hi, y_hi) >= big else x_hi + y_hi
    psi_lo = -big if (y_lo <= -big or x_hi >= big) else y_lo - x_hi
    psi_hi = big if (y_hi >= big or x_lo <= -big) else y_hi - x_lo
    return (phi_lo, phi_hi, psi_lo, psi_hi)


@dataclass(frozen=True)
class Complement(Region):
    inner: Region

    def mask(self, xs, ys):
        return ~self.inner.mask(xs, ys)

    def program(self):
        return self.inner.program() + [[OP_NOT, 0, 0, 0, 0]]


@dataclass(frozen=True)
class Intersection(Region):
    parts: Tuple[Region, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def mask(self, xs, ys):
        out = np.ones(np.shape(xs), dtype=bool)
        for part in self.parts:
            out &= part.mask(xs, ys)
        return out

    def program(self):
        if not self.parts:
            return PLANE.program()
        rows = self.parts[0].program()
        for part in self.parts[1:]:
            rows += part.program() + [[OP_AND, 0, 0, 0, 0]]
        return rows

    def bounds(self):
        b = [-UNBOUNDED, UNBOUNDED, -UNBOUNDED, UNBOUNDED]
        for part in self.parts:
            p = part.bounds()
            b = [max(b[0], p[0]), min(b[1], p[1]), max(b[2], p[2]), min(b[3], p[3])]
        return tuple(b)


@dataclass(frozen=True)
class Union(Region):
    parts: Tuple[Region, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def mask(self, xs, ys):
        out = np.zeros(np.shape(xs), dtype=bool)
        for part in self.parts:
            out |= part.mask(xs, ys)
        return out

    def program(self):
        if not self.parts:
            return EMPTY.program()
        rows = self.parts[0].program()
        for part in self.parts[1:]:
            rows += part.program() + [[OP_OR, 0, 0, 0, 0]]
        return rows

    def bounds(self):
        if not self.parts:
            return (1, 0, 1, 0)
        hulls = [p.bounds() for p in self.parts]
        return (min(h[0] for h in hulls), max(h[1] for h in hulls),
                min(h[2] for h in hulls), max(h[3] for h in hulls))


PLANE = Rectangle()
EMPTY = Complement(PLANE)


def point_region(p) -> Rectangle:
    """The region holding the single lattice point ``p``."""
    x, y = int(p[0]), int(p[1])
    return Rectangle(x + y, x + y, y - x, y - x)


def band(psi_lo, psi_hi) -> Rectangle:
    """All points with ``psi_lo <= y - x <= psi_hi``."""
    return Rectangle(psi_lo=psi_lo, psi_hi=psi_hi)
