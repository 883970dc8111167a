"""Last passage times, geodesics, constrained and discounted passage.

Conventions used throughout:

* the passage time of a path sums the weights of all its vertices except
  the final one, so ``T(u, u) == 0``;
* when the two predecessors of a cell have exactly equal values the step
  from below, ``(x, y - 1)``, wins.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .errors import DomainError, InstanceTooLargeError
from .field import LatticePoint, WeightField, as_point, weights, with_discount
from .regions import Region

BRUTE_FORCE_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """An up-right lattice path and its passage time."""

    vertices: np.ndarray
    passage_time: float

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, GeodesicPath):
            return NotImplemented
        return (self.passage_time == other.passage_time
                and np.array_equal(self.vertices, other.vertices))

    @property
    def start(self) -> LatticePoint:
        return LatticePoint(*map(int, self.vertices[0]))

    @property
    def end(self) -> LatticePoint:
        return LatticePoint(*map(int, self.vertices[-1]))

    @property
    def phi(self) -> np.ndarray:
        return self.vertices[:, 0] + self.vertices[:, 1]

    @property
    def psi(self) -> np.ndarray:
        return self.vertices[:, 1] - self.vertices[:, 0]

    def points(self):
        return [LatticePoint(int(x), int(y)) for x, y in self.vertices]

    def is_up_right(self) -> bool:
        steps = np.diff(self.vertices, axis=0)
        return bool(np.all((steps.sum(axis=1) == 1) & (steps.min(axis=1) == 0)))

    def recompute_time(self, field: WeightField) -> float:
        w = weights(field, self.vertices[:-1, 0], self.vertices[:-1, 1])
        return float(np.add.accumulate(w)[-1]) if len(w) else 0.0


def _ordered(u, v):
    u, v = as_point(u), as_point(v)
    if u.x > v.x or u.y > v.y:
        raise DomainError(f"{tuple(u)} is not coordinatewise below {tuple(v)}")
    return u, v


def _sweep(field, u, v, region, track):
    if region is None:
        c, rid = field.compiled, -1
        psi_lo = psi_hi = 0
    else:
        c, rid = field.with_extra_region(region)
        _, _, psi_lo, psi_hi = region.bounds()
    dx, dy = v.x - u.x, v.y - u.y
    nbits = ((dx + 1) * (dy + 1) + 7) // 8 if track else 1
    bits = np.zeros(nbits, dtype=np.uint8)
    value = _kernels.sweep(u.x, u.y, v.x, v.y, c.nodes, c.lkeys, c.lconst, c.rprog, c.roff,
                           rid, psi_lo, psi_hi, track, bits)
    return value, bits


def last_passage_time(field: WeightField, u, v) -> float:
    """Maximal passage time over up-right paths from ``u`` to ``v``.

    The sweep keeps one antidiagonal of reals, so memory is linear in the
    side of the box.
    """
    u, v = _ordered(u, v)
    return float(_sweep(field, u, v, None, False)[0])


def geodesic(field: WeightField, u, v) -> GeodesicPath:
    """The maximising path from ``u`` to ``v`` (ties: step from below)."""
    u, v = _ordered(u, v)
    value, bits = _sweep(field, u, v, None, True)
    return GeodesicPath(_kernels.backtrack(u.x, u.y, v.x, v.y, bits), float(value))


def constrained_passage(field: WeightField, u, v, region: Region) -> Optional[Tuple[float, GeodesicPath]]:
    """Best path from ``u`` to ``v`` with every vertex in ``region``.

    Returns ``None`` when no admissible path exists.
    """
    u, v = _ordered(u, v)
    value, bits = _sweep(field, u, v, region, True)
    if value == -np.inf:
        return None
    return float(value), GeodesicPath(_kernels.backtrack(u.x, u.y, v.x, v.y, bits), float(value))


def constrained_time(field: WeightField, u, v, region: Region) -> Optional[float]:
    """Like :func:`constrained_passage` without path reconstruction."""
    u, v = _ordered(u, v)
    value, _ = _sweep(field, u, v, region, False)
    return None if value == -np.inf else float(value)


def discounted_passage(field: WeightField, u, v, region: Region) -> Tuple[float, GeodesicPath]:
    """Passage with weights inside ``region`` set to zero, and its maximiser."""
    path = geodesic(with_discount(field, region), u, v)
    return path.passage_time, path


@lru_cache(maxsize=64)
def _step_table(dx, dy):
    n = dx + dy
    table = np.zeros((comb(n, dx), n), dtype=bool)
    for row, rights in enumerate(itertools.combinations(range(n), dx)):
        table[row, list(rights)] = True
    return table


def brute_force_passage(field: WeightField, u, v, region: Optional[Region] = None,
                        discount: Optional[Region] = None) -> Optional[Tuple[float, GeodesicPath]]:
    """Exhaustive maximisation over every up-right path (an oracle).

    Ties are resolved like the sweep: compare the paths' steps from the end
    backwards and prefer the vertical step at the first difference.
    """
    u, v = _ordered(u, v)
    dx, dy = v.x - u.x, v.y - u.y
    count = comb(dx + dy, dx)
    if count > BRUTE_FORCE_LIMIT:
        raise InstanceTooLargeError(f"{count} paths exceed the brute-force limit {BRUTE_FORCE_LIMIT}")
    if discount is not None:
        field = with_discount(field, discount)
    steps = _step_table(dx, dy)
    xs = u.x + np.concatenate([np.zeros((count, 1), np.int64), np.cumsum(steps, axis=1)], axis=1)
    ys = u.y + np.concatenate([np.zeros((count, 1), np.int64), np.cumsum(~steps, axis=1)], axis=1)
    ok = np.ones(count, dtype=bool)
    if region is not None:
        ok = region.mask(xs, ys).all(axis=1)
        if not ok.any():
            return None
    gx, gy = np.meshgrid(np.arange(u.x, v.x + 1), np.arange(u.y, v.y + 1), indexing="ij")
    grid = weights(field, gx.ravel(), gy.ravel()).reshape(gx.shape)
    if dx + dy == 0:
        times = np.zeros(count)
    else:
        times = np.add.accumulate(grid[xs[:, :-1] - u.x, ys[:, :-1] - u.y], axis=1)[:, -1]
    times = np.where(ok, times, -np.inf)
    best = times.max()
    tied = np.flatnonzero(times == best)
    if len(tied) > 1:
        rev = steps[tied, ::-1].astype(np.int64)
        order = np.lexsort(rev.T[::-1])
        tied = tied[order]
    k = tied[0]
    return float(best), GeodesicPath(np.stack([xs[k], ys[k]], axis=1), float(best))
