"""Reproducible trial campaigns, binomial intervals and decay/scaling fits.

Trial ``i`` of a campaign always runs on ``derive_trial_field(seed, i)``, so
results depend on the seed and the trial index only, never on how trials
were scheduled across workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field as dc_field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .construction import build_construction, evaluate_events, implication_audit
from .errors import CampaignAborted, DomainError, InsufficientDataError
from .field import derive_trial_field
from .geometry import f_expected, temporal_deviation, transversal_fluctuation
from .passage import geodesic, last_passage_time

MIN_SUCCESSES = 5
STATISTICS = ("tf_local", "tf_global", "temporal_upper", "temporal_lower")
KINDS = ("tail_curve", "event_table", "scaling_fit", "audit_suite")


def default_workers() -> int:
    env = os.environ.get("LPPLAB_WORKERS")
    return max(1, int(env)) if env else 1


@dataclass(frozen=True)
class CampaignSpec:
    kind: str
    trials: int
    master_seed: int
    n: Optional[int] = None
    r: Optional[int] = None
    t: Optional[float] = None
    t_grid: tuple = ()
    n_grid: tuple = ()
    statistic: Optional[str] = None
    workers: int = 1
    construction: dict = dc_field(default_factory=dict)
    confidence: float = 0.95

    def validate(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown campaign kind {self.kind!r}")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")
        for name in ("t_grid", "n_grid"):
            grid = getattr(self, name)
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise DomainError(f"{name} must be strictly increasing")
        if self.n is not None and self.r is not None and self.n < self.r:
            raise DomainError(f"need n >= r, got n={self.n} < r={self.r}")
        if self.statistic is not None and self.statistic not in STATISTICS:
            raise DomainError(f"unknown statistic {self.statistic!r}")
        return self

    def params(self) -> dict:
        """Parameters echoed into outputs; the worker count is excluded
        because it must not influence results."""
        d = asdict(self)
        d.pop("workers")
        d["t_grid"] = list(self.t_grid)
        d["n_grid"] = list(self.n_grid)
        return d


@dataclass
class TrialRecord:
    trial_index: int
    payload: dict


def run_trials(spec: CampaignSpec, trial_fn: Callable[[int], dict],
               indices: Optional[Sequence[int]] = None) -> List[TrialRecord]:
    """Run ``trial_fn`` on every trial index and return records sorted by index.

    A failing trial aborts the campaign; the exception carries the records
    finished before the abort.
    """
    spec.validate()
    indices = list(range(spec.trials)) if indices is None else list(indices)
    done: Dict[int, dict] = {}
    if spec.workers == 1:
        for i in indices:
            try:
                done[i] = trial_fn(i)
            except Exception as exc:
                raise CampaignAborted(f"trial {i} failed: {exc!r}", _records(done)) from exc
        return _records(done)
    with ThreadPoolExecutor(max_workers=spec.workers) as pool:
        futures = {pool.submit(trial_fn, i): i for i in indices}
        for fut in as_completed(futures):
            i = futures[fut]
            try:
                done[i] = fut.result()
            except Exception as exc:
                for other in futures:
                    other.cancel()
                raise CampaignAborted(f"trial {i} failed: {exc!r}", _records(done)) from exc
    return _records(done)


def _records(done):
    return [TrialRecord(i, done[i]) for i in sorted(done)]


def trial_statistics(field, n: int, r: Optional[int] = None, path: bool = True) -> dict:
    """Raw per-trial statistics of the geodesic from the origin to ``(n, n)``.

    ``tf_local`` is ``TF^n(r)``, ``tf_global`` is ``TF^n(n)``, ``T`` the
    passage time and ``temporal`` its deviation from ``4n`` on the
    ``(2n)^(1/3)`` scale.
    """
    if path:
        g = geodesic(field, (0, 0), (n, n))
        T = g.passage_time
        out = {"tf_global": transversal_fluctuation(g, n)}
        if r is not None:
            out["tf_local"] = transversal_fluctuation(g, r)
    else:
        T = last_passage_time(field, (0, 0), (n, n))
        out = {}
    out["T"] = T
    out["temporal"] = float(temporal_deviation(T, (0, 0), (n, n)))
    return out


def estimate_probability(successes: int, trials: int, confidence: float = 0.95):
    """Point estimate and Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if not 0 < confidence < 1:
        raise DomainError("confidence must lie in (0, 1)")
    if not 0 <= successes <= trials:
        raise DomainError(f"successes={successes} outside [0, trials={trials}]")
    z = stats.norm.ppf(0.5 + confidence / 2)
    p = successes / trials
    z2n = z * z / trials
    centre = (p + z2n / 2) / (1 + z2n)
    half = z / (1 + z2n) * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials))
    lo = 0.0 if successes == 0 else max(0.0, min(p, centre - half))
    hi = 1.0 if successes == trials else min(1.0, max(p, centre + half))
    return p, lo, hi


@dataclass
class TailRow:
    t: float
    successes: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float


@dataclass
class TailCurve:
    statistic: str
    rows: List[TailRow]
    interval: str = "wilson"
    confidence: float = 0.95

    def as_dict(self):
        return asdict(self)


def scaled_values(statistic: str, records: Sequence[dict], n: int, r: Optional[int] = None):
    if statistic == "tf_local":
        return np.array([rec["tf_local"] for rec in records], float) / np.cbrt(r) ** 2
    if statistic == "tf_global":
        return np.array([rec["tf_global"] for rec in records], float) / np.cbrt(n) ** 2
    return np.array([rec["temporal"] for rec in records], float)


def curve_from_values(statistic: str, values, t_grid, confidence: float = 0.95) -> TailCurve:
    """Apply every threshold of ``t_grid`` to the same sample of values."""
    if len(t_grid) == 0:
        raise DomainError("empty t-grid")
    values = np.asarray(values, dtype=float)
    rows = []
    for t in t_grid:
        if statistic == "temporal_lower":
            k = int(np.count_nonzero(values <= -t))
        else:
            k = int(np.count_nonzero(values > t))
        p, lo, hi = estimate_probability(k, len(values), confidence)
        rows.append(TailRow(float(t), k, len(values), p, lo, hi))
    return TailCurve(statistic, rows, confidence=confidence)


def tail_curve(spec: CampaignSpec) -> TailCurve:
    """Empirical tail of ``spec.statistic`` on ``spec.trials`` fresh fields."""
    spec.validate()
    if not spec.t_grid:
        raise DomainError("empty t-grid")
    need_path = spec.statistic in ("tf_local", "tf_global")
    recs = run_trials(spec, lambda i: trial_statistics(
        derive_trial_field(spec.master_seed, i), spec.n, spec.r, need_path))
    values = scaled_values(spec.statistic, [rec.payload for rec in recs], spec.n, spec.r)
    return curve_from_values(spec.statistic, values, spec.t_grid, spec.confidence)


@dataclass
class FitResult:
    model: str
    a: float
    slope: float
    r2: float
    residuals: List[float]
    beta: Optional[float] = None

    @property
    def c(self) -> float:
        """Decay rate of ``log p = a - c t^beta``."""
        return -self.slope

    @property
    def alpha(self) -> float:
        """Exponent of ``log s = a + alpha log n``."""
        return self.slope

    def as_dict(self):
        d = asdict(self)
        d["c" if self.beta is not None else "alpha"] = self.slope if self.beta is None else -self.slope
        return d


def _ols(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    a = float(ym - slope * xm)
    resid = y - (a + slope * x)
    sst = float(np.sum((y - ym) ** 2))
    r2 = 0.0 if sst == 0 else 1.0 - float(np.sum(resid ** 2)) / sst
    return a, slope, r2, resid.tolist()


def fit_tail_exponent(curve: TailCurve, beta: float) -> FitResult:
    """Least squares of ``log p_hat`` on ``t**beta`` over rows with enough hits."""
    rows = [row for row in curve.rows if row.successes >= MIN_SUCCESSES]
    if len(rows) < 3:
        raise InsufficientDataError(f"{len(rows)} rows with >= {MIN_SUCCESSES} successes; need 3")
    x = [row.t ** beta for row in rows]
    y = [math.log(row.p_hat) for row in rows]
    a, slope, r2, resid = _ols(x, y)
    return FitResult(f"log p = a - c t^{beta:g}", a, slope, r2, resid, beta=beta)


def fit_power_law(ns, values) -> FitResult:
    """Least squares of ``log value`` on ``log n``."""
    if len(ns) < 4:
        raise InsufficientDataError(f"need at least 4 grid points, got {len(ns)}")
    values = np.asarray(values, float)
    if np.any(values <= 0):
        raise InsufficientDataError("scaling fit needs strictly positive summaries")
    a, slope, r2, resid = _ols(np.log(ns), np.log(values))
    return FitResult("log s = a + alpha log n", a, slope, r2, resid)


def scaling_samples(n_grid, trials: int, master_seed: int, workers: int = 1,
                    path: bool = True) -> Dict[int, List[dict]]:
    """Per-``n`` trial statistics; grid point ``j`` uses trial indices
    ``j * trials .. (j + 1) * trials - 1`` so no two sizes share a field."""
    out = {}
    for j, n in enumerate(n_grid):
        spec = CampaignSpec("scaling_fit", trials, master_seed, n=n, workers=workers)
        recs = run_trials(spec, lambda i, n=n: trial_statistics(
            derive_trial_field(master_seed, i), n, None, path),
            indices=range(j * trials, (j + 1) * trials))
        out[n] = [rec.payload for rec in recs]
    return out


def scaling_summary(statistic: str, samples: Dict[int, List[dict]]) -> Dict[int, float]:
    """Median of ``TF^n(n)`` (``tf``) or interquartile range of ``T`` (``temporal``)."""
    summary = {}
    for n, recs in samples.items():
        if statistic == "tf":
            summary[n] = float(np.median([rec["tf_global"] for rec in recs]))
        elif statistic == "temporal":
            q75, q25 = np.percentile([rec["T"] for rec in recs], [75, 25])
            summary[n] = float(q75 - q25)
        else:
            raise DomainError(f"unknown scaling statistic {statistic!r}")
    return summary


def fit_scaling_exponent(statistic: str, n_grid, trials: int, master_seed: int,
                         workers: int = 1) -> FitResult:
    """Fitted growth exponent of the ``tf`` or ``temporal`` scale in ``n``."""
    if len(n_grid) < 4:
        raise InsufficientDataError(f"need at least 4 grid points, got {len(n_grid)}")
    samples = scaling_samples(n_grid, trials, master_seed, workers, path=statistic == "tf")
    summary = scaling_summary(statistic, samples)
    return fit_power_law(list(summary), list(summary.values()))


def event_trial(spec: CampaignSpec):
    c = build_construction(spec.r, spec.t, spec.n, **spec.construction)

    def run(i):
        return evaluate_events(derive_trial_field(spec.master_seed, i), c).as_dict()
    return run


def audit_trial(spec: CampaignSpec):
    c = build_construction(spec.r, spec.t, spec.n, **spec.construction)

    def run(i):
        return implication_audit(derive_trial_field(spec.master_seed, i), c).as_dict()
    return run


EVENT_NAMES = ("A", "B", "C", "D", "E", "E_prime", "E_R")


def event_table(records: Sequence[dict], confidence: float = 0.95) -> Dict[str, dict]:
    """Frequency and Wilson interval of every event over a set of reports."""
    table = {}
    for name in EVENT_NAMES:
        k = sum(bool(rec[name]) for rec in records)
        p, lo, hi = estimate_probability(k, len(records), confidence)
        table[name] = {"successes": k, "trials": len(records), "p_hat": p,
                       "ci_low": lo, "ci_high": hi}
    return table
