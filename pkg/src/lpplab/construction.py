"""Proof geometry for a pair ``(r, t)`` and the events evaluated on it.

The rectangle ``R`` sits well above the diagonal between ``phi = 2r/3`` and
``phi = 4r/3``; the band ``S`` holds every point of the ``r``-box within
``t r^(2/3)`` of the diagonal (and everything below it).  A long path through
``R`` that beats every path confined to ``S`` pushes the geodesic to the
origin-to-``(r, r)`` out of ``S``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field as dc_field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import BuildError, DomainError
from .field import LatticePoint, WeightField, derive_trial_field, hybrid_field
from .geometry import (crossing_point, f_expected, ordering_check, phi, precedes, psi,
                       temporal_deviation, transversal_fluctuation)
from .passage import (GeodesicPath, constrained_time, discounted_passage, geodesic,
                      last_passage_time)
from .regions import HalfPlaneBand, Rectangle, Region, point_region

ORIGIN = LatticePoint(0, 0)
# relative slack applied before declaring one float passage time larger than another
REL_TOL = 1e-9


def _floor(x):
    return math.floor(round(x, 9))


def _ceil(x):
    return math.ceil(round(x, 9))


@dataclass(frozen=True)
class Construction:
    r: int
    t: float
    n: int
    u: LatticePoint
    v: LatticePoint
    R: Region
    S: HalfPlaneBand
    threshold_A: float
    threshold_D: float
    kappa_A: float = 10.0
    kappa_D: float = 1.0
    crossing_phi: int = 0
    epsilon: float = 0.01

    @property
    def r13(self) -> float:
        return float(np.cbrt(self.r))

    @property
    def r23(self) -> float:
        return self.r13 ** 2

    @property
    def corner(self) -> LatticePoint:
        return LatticePoint(self.r, self.r)

    @property
    def feasible(self) -> bool:
        """Whether ``o <= u`` and ``v <= (r, r)``, so the o-u-v-(r,r) chain exists."""
        return precedes(ORIGIN, self.u) and precedes(self.v, self.corner)

    @property
    def tf_level(self) -> float:
        return self.t * self.r23

    def params(self) -> dict:
        return {"r": self.r, "t": self.t, "n": self.n, "kappa_A": self.kappa_A,
                "kappa_D": self.kappa_D, "crossing_phi": self.crossing_phi,
                "epsilon": self.epsilon}


def build_construction(r: int, t: float, n: int, *, kappa_a: float = 10.0, kappa_d: float = 1.0,
                       crossing: str = "2r", epsilon: float = 0.01) -> Construction:
    """Build and validate the construction for ``(r, t)`` inside the ``n``-box."""
    if not 0 < epsilon < 1:
        raise BuildError(f"epsilon must lie in (0, 1), got {epsilon}")
    if r < 27:
        raise BuildError(f"need r >= 27, got r={r}")
    if not t > 0:
        raise BuildError(f"need t > 0, got t={t}")
    r13 = float(np.cbrt(r))
    if t > (1 - epsilon) * r13:
        raise BuildError(f"need t <= (1 - epsilon) r^(1/3) = {(1 - epsilon) * r13:.6g}, got t={t}")
    if n < r:
        raise BuildError(f"need n >= r, got n={n} < r={r}")
    if crossing not in ("r", "2r"):
        raise BuildError(f"crossing must be 'r' or '2r', got {crossing!r}")
    r23 = r13 * r13
    shift = (t + 1) * r23
    u = LatticePoint(_floor(r / 3 - shift), _ceil(r / 3 + shift))
    v = LatticePoint(_floor(2 * r / 3 - shift), _ceil(2 * r / 3 + shift))
    width = math.ceil(round(r23, 9))
    lo = min(psi(u), psi(v)) - math.ceil(width / 2)
    hi = max(psi(u), psi(v)) + (width - math.ceil(width / 2))
    R = Rectangle(phi(u), phi(v), lo, hi)
    S = HalfPlaneBand(psi_max=_floor(t * r23), phi_max=2 * r)
    if R.psi_lo <= S.psi_max:
        raise BuildError(f"rectangle (min psi {R.psi_lo}) meets the band (psi <= {S.psi_max})")
    return Construction(
        r=r, t=float(t), n=n, u=u, v=v, R=R, S=S,
        threshold_A=f_expected(u, v) + kappa_a * t * t * r13,
        threshold_D=4 * r + kappa_d * t * t * r13,
        kappa_A=kappa_a, kappa_D=kappa_d,
        crossing_phi=2 * r if crossing == "2r" else r,
        epsilon=epsilon,
    )


def lies_below(path: GeodesicPath, region: Region) -> bool:
    """Every vertex in the region's phi-range sits strictly below its psi-range."""
    phi_lo, phi_hi, psi_lo, _ = region.bounds()
    ph = path.phi
    sel = (ph >= phi_lo) & (ph <= phi_hi)
    return bool(np.all(path.psi[sel] < psi_lo))


@dataclass
class EventReport:
    A: bool
    B: bool
    C: bool
    D: bool
    E: bool
    E_prime: bool
    E_R: bool
    passage_R: Optional[float]
    T_ou: Optional[float]
    T_vr: Optional[float]
    passage_S: Optional[float]
    T_rr: float
    psi_n: int
    psi_R: int
    n_below_R: bool
    R_below_R: bool
    tf_rr: int
    tf_nr: int
    concat_time: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def event_A(field: WeightField, c: Construction) -> Tuple[bool, Optional[float]]:
    value = constrained_time(field, c.u, c.v, c.R)
    return (value is not None and value > c.threshold_A), value


def event_B(field, c):
    if not c.feasible:
        return False, None
    value = last_passage_time(field, ORIGIN, c.u)
    return value >= f_expected(ORIGIN, c.u) - c.t * c.r13, value


def event_C(field, c):
    if not c.feasible:
        return False, None
    value = last_passage_time(field, c.v, c.corner)
    return value >= f_expected(c.v, c.corner) - c.t * c.r13, value


def event_D(field, c):
    value = constrained_time(field, ORIGIN, c.corner, c.S)
    return (value is None or value < c.threshold_D), value


def event_E_R(field, c) -> Tuple[bool, GeodesicPath]:
    _, path = discounted_passage(field, ORIGIN, (c.n, c.n), c.R)
    below = lies_below(path, c.R)
    return below and psi(crossing_point(path, c.crossing_phi)) >= 0, path


def _evaluate(field: WeightField, c: Construction):
    A, pR = event_A(field, c)
    B, T_ou = event_B(field, c)
    C, T_vr = event_C(field, c)
    D, pS = event_D(field, c)
    gamma_n = geodesic(field, ORIGIN, (c.n, c.n))
    gamma_r = geodesic(field, ORIGIN, c.corner)
    E_R, gamma_R = event_E_R(field, c)
    psi_n = psi(crossing_point(gamma_n, c.crossing_phi))
    n_below = lies_below(gamma_n, c.R)
    concat = None
    if c.feasible and pR is not None:
        concat = T_ou + pR + T_vr
    report = EventReport(
        A=A, B=B, C=C, D=D,
        E=psi_n >= 0,
        E_prime=n_below and psi_n >= 0,
        E_R=E_R,
        passage_R=pR, T_ou=T_ou, T_vr=T_vr, passage_S=pS,
        T_rr=gamma_r.passage_time,
        psi_n=psi_n,
        psi_R=psi(crossing_point(gamma_R, c.crossing_phi)),
        n_below_R=n_below,
        R_below_R=lies_below(gamma_R, c.R),
        tf_rr=transversal_fluctuation(gamma_r, c.r),
        tf_nr=transversal_fluctuation(gamma_n, c.r),
        concat_time=concat,
    )
    return report, gamma_n, gamma_r


def evaluate_events(field: WeightField, c: Construction) -> EventReport:
    """Evaluate events A-E, E' and E^R, with the values behind them."""
    return _evaluate(field, c)[0]


def _exceeds(a, b):
    return a > b + REL_TOL * max(1.0, abs(b))


@dataclass
class Check:
    name: str
    antecedent: bool
    holds: bool

    @property
    def violated(self) -> bool:
        return self.antecedent and not self.holds


@dataclass
class AuditReport:
    events: EventReport
    checks: List[Check]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def violations(self) -> List[str]:
        return [ch.name for ch in self.checks if ch.violated]

    def as_dict(self) -> dict:
        return {"events": self.events.as_dict(),
                "checks": [asdict(ch) for ch in self.checks],
                "violations": self.violations}


def implication_audit(field: WeightField, c: Construction) -> AuditReport:
    """Check, on one field, the deterministic implications behind the bounds.

    ``concat_beats_S``: the o-u-v-(r,r) chain through ``R`` beats the best
    path inside ``S``, so the geodesic to ``(r, r)`` leaves ``S``.
    ``forces_TF_n``: additionally under E the geodesic to ``(n, n)`` runs
    above the one to ``(r, r)`` and inherits its excursion.
    ``superadditive``: the chain never beats the unconstrained optimum.
    """
    ev, gamma_n, gamma_r = _evaluate(field, c)
    level = c.tf_level
    chain = ev.concat_time is not None
    beats_S = chain and (ev.passage_S is None or _exceeds(ev.concat_time, ev.passage_S))
    above = psi(crossing_point(gamma_n, 2 * c.r)) >= 0
    ordered = ordering_check(gamma_r, gamma_n, 0, 2 * c.r)
    checks = [
        Check("E_prime_implies_E_R", ev.E_prime, ev.E_R),
        Check("E_R_implies_E", ev.E_R, ev.E),
        Check("concat_beats_S", beats_S, ev.tf_rr > level),
        Check("forces_TF_n", beats_S and ev.E, ordered and ev.tf_nr > level),
        Check("ordered_when_above", above, ordered),
        Check("superadditive", chain, chain and not _exceeds(ev.concat_time, ev.T_rr)),
    ]
    return AuditReport(ev, checks)


@dataclass
class PartitionReport:
    midpoints: List[LatticePoint]
    segment_times: List[float]
    segment_deviations: List[float]
    total: float
    whole: float

    @property
    def holds(self) -> bool:
        return not _exceeds(self.total, self.whole)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["midpoints"] = [list(p) for p in self.midpoints]
        d["holds"] = self.holds
        return d


def partition_midpoints(c: Construction, delta_inv: int) -> List[LatticePoint]:
    span = phi(c.v) - phi(c.u)
    if not 1 <= delta_inv <= span:
        raise BuildError(f"delta_inv must lie in [1, {span}], got {delta_inv}")
    pts = []
    for i in range(delta_inv + 1):
        ph = phi(c.u) + (i * span) // delta_inv
        ps = psi(c.u) + i * (psi(c.v) - psi(c.u)) / delta_inv
        x, y = math.floor((ph - ps) / 2), math.floor((ph + ps) / 2)
        if x + y != ph:
            y += 1
        p = LatticePoint(x, y)
        if not c.R.contains(p):
            raise BuildError(f"midpoint {tuple(p)} falls outside the rectangle")
        if pts and not precedes(pts[-1], p):
            raise BuildError(f"midpoints {tuple(pts[-1])} and {tuple(p)} are not ordered")
        pts.append(p)
    return pts


def lemma_partition_report(field: WeightField, c: Construction, delta_inv: int) -> PartitionReport:
    """Cut ``R`` into ``delta_inv`` pieces and compare the pieces' best paths
    with the best path through the whole rectangle."""
    pts = partition_midpoints(c, delta_inv)
    times, devs = [], []
    for a, b in zip(pts, pts[1:]):
        s = constrained_time(field, a, b, c.R)
        if s is None:
            raise BuildError(f"no path inside the rectangle from {tuple(a)} to {tuple(b)}")
        times.append(s)
        devs.append(temporal_deviation(s, a, b))
    whole = constrained_time(field, c.u, c.v, c.R)
    return PartitionReport(pts, times, devs, float(math.fsum(times)) if len(times) > 1 else times[0], whole)


@dataclass
class IndependenceReport:
    pairs: int
    violations: int
    changed: Dict[str, int] = dc_field(default_factory=dict)

    def as_dict(self):
        return asdict(self)


def independence_audit(seed: int, c: Construction, pairs: int) -> IndependenceReport:
    """Re-randomise inside ``R`` (resp. outside) and confirm which events stay put.

    The inside swap spares the far corner ``v``: its weight is counted by
    the passage ``v -> (r, r)`` and excluded from every ``u -> v`` path.
    """
    inner = c.R & ~point_region(c.v)
    changed = {"E_R": 0, "B": 0, "C": 0, "D": 0, "A": 0}
    for i in range(pairs):
        outside = derive_trial_field(seed, 4 * i)
        in1 = derive_trial_field(seed, 4 * i + 1)
        in2 = derive_trial_field(seed, 4 * i + 2)
        out2 = derive_trial_field(seed, 4 * i + 3)
        f1 = hybrid_field(in1, outside, inner)
        f2 = hybrid_field(in2, outside, inner)
        e1, g1 = event_E_R(f1, c)
        e2, g2 = event_E_R(f2, c)
        if e1 != e2 or not np.array_equal(g1.vertices, g2.vertices):
            changed["E_R"] += 1
        for name, fn in (("B", event_B), ("C", event_C), ("D", event_D)):
            if fn(f1, c) != fn(f2, c):
                changed[name] += 1
        h1 = hybrid_field(in1, outside, c.R)
        h2 = hybrid_field(in1, out2, c.R)
        if event_A(h1, c) != event_A(h2, c):
            changed["A"] += 1
    return IndependenceReport(pairs, sum(changed.values()), changed)


__all__ = [
    "AuditReport", "Check", "Construction", "EventReport", "IndependenceReport",
    "PartitionReport", "build_construction", "evaluate_events", "implication_audit",
    "independence_audit", "lemma_partition_report", "lies_below", "partition_midpoints",
    "event_A", "event_B", "event_C", "event_D", "event_E_R",
]
