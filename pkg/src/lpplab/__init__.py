"""Exponential last passage percolation at desk scale.

Deterministic weight fields, exact passage times and geodesics, the
transversal-fluctuation construction and its event calculus, and
reproducible Monte Carlo campaigns around them.
"""

from .errors import (BuildError, CampaignAborted, CoordinateOverflowError, DomainError,
                     InstanceTooLargeError, InsufficientDataError, LppError)
from .regions import (EMPTY, PLANE, AxisBox, Complement, HalfPlaneBand, Intersection, Rectangle,
                      Region, Union, band, point_region)
from .field import (LatticePoint, WeightField, compiled_weights, constant_field,
                    derive_trial_field, hybrid_field, uniforms, weight_at, weights, with_discount)
from .passage import (GeodesicPath, brute_force_passage, constrained_passage, constrained_time,
                      discounted_passage, geodesic, last_passage_time)
from .geometry import (common_prefix_check, crossing_point, direction_ratio, f_expected,
                       from_diagonal, ordering_check, phi, precedes, psi, temporal_deviation,
                       transversal_fluctuation)
from .construction import (AuditReport, Construction, EventReport, build_construction,
                           evaluate_events, implication_audit, independence_audit,
                           lemma_partition_report)
from .montecarlo import (CampaignSpec, FitResult, TailCurve, estimate_probability,
                         fit_power_law, fit_scaling_exponent, fit_tail_exponent, run_trials,
                         tail_curve, trial_statistics)

__version__ = "0.1.0"
