"""Diagonal coordinates, the centering shape function, and path statistics."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .field import LatticePoint, as_point
from .passage import GeodesicPath


def phi(p) -> int:
    """Position along the diagonal, ``x + y``."""
    return int(p[0]) + int(p[1])


def psi(p) -> int:
    """Signed distance from the diagonal, ``y - x``."""
    return int(p[1]) - int(p[0])


def from_diagonal(phi_value: int, psi_value: int) -> LatticePoint:
    if (phi_value - psi_value) % 2:
        raise DomainError("phi and psi must have equal parity")
    return LatticePoint((phi_value - psi_value) // 2, (phi_value + psi_value) // 2)


def precedes(u, v) -> bool:
    return u[0] <= v[0] and u[1] <= v[1]


def f_expected(u, v) -> float:
    """First-order passage time ``(sqrt(dx) + sqrt(dy))**2``; 0 unless u <= v."""
    if not precedes(u, v):
        return 0.0
    return (math.sqrt(v[0] - u[0]) + math.sqrt(v[1] - u[1])) ** 2


def _require_origin(path: GeodesicPath):
    if tuple(path.start) != (0, 0):
        raise DomainError(f"path starts at {tuple(path.start)}, not at the origin")


def transversal_fluctuation(path: GeodesicPath, r: int) -> int:
    """Largest ``|psi|`` among path vertices with ``0 <= phi <= 2r``."""
    _require_origin(path)
    ph = path.phi
    keep = (ph >= 0) & (ph <= 2 * r)
    return int(np.abs(path.psi[keep]).max())


def crossing_point(path: GeodesicPath, T: int) -> LatticePoint:
    """The unique vertex of ``path`` on the antidiagonal ``x + y = T``."""
    first = phi(path.start)
    if not first <= T <= phi(path.end):
        raise DomainError(f"line x+y={T} is outside the path's range [{first}, {phi(path.end)}]")
    x, y = path.vertices[T - first]
    return LatticePoint(int(x), int(y))


def temporal_deviation(time: float, u, v) -> float:
    """``(time - f(u, v)) / dphi**(1/3)`` with ``dphi`` the phi-increment."""
    u, v = as_point(u), as_point(v)
    if not precedes(u, v):
        raise DomainError(f"{tuple(u)} is not coordinatewise below {tuple(v)}")
    dphi = phi(v) - phi(u)
    if dphi < 1:
        raise DomainError("temporal deviation needs distinct endpoints")
    return (time - f_expected(u, v)) / np.cbrt(dphi)


def direction_ratio(u, v) -> float:
    """``dx / dy`` of the segment; recorded beside temporal statistics."""
    dx, dy = v[0] - u[0], v[1] - u[1]
    return math.inf if dy == 0 else dx / dy


def common_prefix_check(p1: GeodesicPath, p2: GeodesicPath) -> bool:
    """True iff the shared vertices of two paths form a common prefix.

    Once two paths from a common start separate they must never meet again.
    """
    if tuple(p1.start) != tuple(p2.start):
        raise DomainError("paths must share their start vertex")
    m = min(len(p1), len(p2))
    same = np.all(p1.vertices[:m] == p2.vertices[:m], axis=1)
    split = int(np.argmin(same)) if not same.all() else m
    # vertices are indexed by phi, so a later meeting shows up as equal rows
    return not same[split:].any()


def ordering_check(low: GeodesicPath, high: GeodesicPath, phi_lo: int, phi_hi: int) -> bool:
    """True iff ``psi(low) <= psi(high)`` on every antidiagonal in range."""
    for p in (low, high):
        if not (phi(p.start) <= phi_lo and phi_hi <= phi(p.end)):
            raise DomainError(f"path does not cover phi range [{phi_lo}, {phi_hi}]")
    a = low.psi[phi_lo - phi(low.start): phi_hi - phi(low.start) + 1]
    b = high.psi[phi_lo - phi(high.start): phi_hi - phi(high.start) + 1]
    return bool(np.all(a <= b))
