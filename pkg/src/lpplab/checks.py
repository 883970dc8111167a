"""Self-check suites: sweep-versus-enumeration and fast invariants."""

from __future__ import annotations

import math

import numpy as np

from .field import derive_trial_field, weights, with_discount
from .geometry import (common_prefix_check, f_expected, from_diagonal, phi, psi,
                       transversal_fluctuation)
from .passage import (brute_force_passage, constrained_passage, geodesic, last_passage_time)
from .regions import AxisBox, Rectangle

ORACLE_SEED = 0x5EED


def random_instance(rng, max_side=8):
    """A small box, optionally with a rectangular constraint and a discount."""
    dx, dy = (int(s) for s in rng.integers(0, max_side + 1, 2))
    u = (int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
    v = (u[0] + dx, u[1] + dy)
    region = discount = None
    if rng.random() < 0.5:
        c = psi(u) + int(rng.integers(-3, 4))
        half = int(rng.integers(0, 4))
        region = Rectangle(phi(u) + int(rng.integers(-1, 2)), phi(v) + int(rng.integers(-1, 2)),
                           c - half, c + half + int(rng.integers(0, 3)))
    if rng.random() < 0.5:
        x0 = u[0] + int(rng.integers(0, dx + 1))
        y0 = u[1] + int(rng.integers(0, dy + 1))
        discount = AxisBox(x0, x0 + int(rng.integers(0, 4)), y0, y0 + int(rng.integers(0, 4)))
    return u, v, region, discount


def compare_instance(field, u, v, region, discount):
    """None when the sweep agrees with enumeration, else a description."""
    f = field if discount is None else with_discount(field, discount)
    fast = constrained_passage(f, u, v, region) if region is not None else None
    if region is None:
        g = geodesic(f, u, v)
        fast = (g.passage_time, g)
    slow = brute_force_passage(field, u, v, region=region, discount=discount)
    if (fast is None) != (slow is None):
        return f"admissibility differs: sweep={fast is not None} enumeration={slow is not None}"
    if fast is None:
        return None
    tol = 1e-9 * max(1.0, abs(slow[0]))
    if abs(fast[0] - slow[0]) > tol:
        return f"time {fast[0]!r} != {slow[0]!r}"
    if not np.array_equal(fast[1].vertices, slow[1].vertices):
        return "argmax paths differ"
    return None


def oracle_suite(instances=500, seed=ORACLE_SEED, max_side=8):
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(instances):
        u, v, region, discount = random_instance(rng, max_side)
        msg = compare_instance(derive_trial_field(seed, i), u, v, region, discount)
        if msg:
            failures.append({"instance": i, "u": u, "v": v, "region": repr(region),
                             "discount": repr(discount), "error": msg})
    return {"instances": instances, "mismatches": len(failures), "failures": failures}


def invariant_suite(seed=ORACLE_SEED):
    """Cheap deterministic invariants; returns ``{name: bool}``."""
    f = derive_trial_field(seed, 0)
    rng = np.random.default_rng(seed)
    out = {}
    out["endpoint_T_uu"] = last_passage_time(f, (3, 4), (3, 4)) == 0.0
    out["endpoint_single_step"] = last_passage_time(f, (0, 0), (1, 0)) == weights(f, [0], [0])[0]
    xs, ys = rng.integers(-50, 50, 1000), rng.integers(-50, 50, 1000)
    out["purity"] = bool(np.array_equal(weights(f, xs, ys), weights(f, xs, ys)))
    out["positive"] = bool(np.all(weights(f, xs, ys) > 0))
    ok = True
    for _ in range(20):
        n = int(rng.integers(4, 30))
        w = (int(rng.integers(0, n + 1)), int(rng.integers(0, n + 1)))
        total = last_passage_time(f, (0, 0), (n, n))
        parts = last_passage_time(f, (0, 0), w) + last_passage_time(f, w, (n, n))
        ok &= parts <= total * (1 + 1e-12)
    out["superadditivity"] = bool(ok)
    g1, g2 = geodesic(f, (0, 0), (20, 20)), geodesic(f, (0, 0), (20, 30))
    out["common_prefix"] = common_prefix_check(g1, g2)
    g = geodesic(f, (0, 0), (30, 30))
    out["tf_monotone"] = all(transversal_fluctuation(g, a) <= transversal_fluctuation(g, a + 1)
                             for a in range(1, 30))
    out["phi_psi_roundtrip"] = all(tuple(from_diagonal(phi(p), psi(p))) == tuple(p)
                                   for p in rng.integers(-99, 99, (50, 2)).tolist())
    out["f_diagonal"] = math.isclose(f_expected((0, 0), (7, 7)), 28.0)
    return out
