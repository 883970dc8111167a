"""
The lower-bound construction
============================

A rectangle R hugs the segment from u to v, lifted (t+1) r^(2/3) above the
diagonal.  If the path through R is unusually heavy (event A) while the
ordinary pieces o->u, v->(r,r) behave (B, C) and nothing inside the band
S = {psi <= t r^(2/3)} is unusually heavy (D), the geodesic to (r, r) must
leave S.  The audit checks that chain of implications trial by trial.
"""

from lpplab import (build_construction, constant_field, derive_trial_field, evaluate_events,
                    hybrid_field, implication_audit, independence_audit)

c = build_construction(729, 2, 2187)
print("u =", tuple(c.u), " v =", tuple(c.v), " R psi range", (c.R.psi_lo, c.R.psi_hi),
      " S psi <=", c.S.psi_max)

c = build_construction(216, 1.0, 432)
rep = evaluate_events(derive_trial_field(5, 0), c)
print("\nevents on one field:", {k: getattr(rep, k) for k in ("A", "B", "C", "D", "E", "E_prime", "E_R")})

# Force A by planting heavy weights in R; the geodesic then has to leave S.
heavy = hybrid_field(constant_field(40.0), derive_trial_field(5, 0), c.R)
audit = implication_audit(heavy, c)
print("planted A:", audit.events.A, " TF^r(r) =", audit.events.tf_rr,
      f"> t r^(2/3) = {c.tf_level:.1f}", " violations:", audit.violations)

# Re-randomising inside R must not move E^R, B, C or D; outside, not A.
print("\nindependence audit:", independence_audit(1, c, 5).as_dict())
