"""Acceptance criteria, each reported as one PASS/FAIL line.

Heavy campaigns are shared through module-scoped fixtures.  Expect the
whole module to take roughly forty minutes on one core.
"""

import subprocess
import sys
import time
import tracemalloc

import numpy as np
import pytest

from lpplab import (build_construction, derive_trial_field, independence_audit,
                    last_passage_time, weight_at)
from lpplab.checks import oracle_suite
from lpplab.montecarlo import (CampaignSpec, audit_trial, curve_from_values, event_table,
                               event_trial, fit_power_law, fit_tail_exponent, run_trials,
                               scaled_values, scaling_samples, scaling_summary, trial_statistics)

SEED = 20261017
RESULTS = []


def report(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def fmt(x):
    return f"{x:.4g}"


@pytest.fixture(scope="module")
def tail_sample():
    """2*10^4 geodesics at n=1024; serves the transversal and temporal tails."""
    spec = CampaignSpec("tail_curve", 20_000, SEED + 5, n=1024, r=256, statistic="tf_local")
    recs = run_trials(spec, lambda i: trial_statistics(derive_trial_field(SEED + 5, i), 1024, 256))
    return [r.payload for r in recs]


@pytest.fixture(scope="module")
def events_r512_t2():
    spec = CampaignSpec("event_table", 2000, SEED + 9, n=1024, r=512, t=2.0)
    return [r.payload for r in run_trials(spec, event_trial(spec))]


def test_criterion_01_oracle_equivalence():
    t0 = time.perf_counter()
    res = oracle_suite(500, SEED + 1, max_side=8)
    dt = time.perf_counter() - t0
    report("criterion 1 oracle equivalence", res["mismatches"] == 0 and dt < 60,
           f"{res['mismatches']} mismatches over {res['instances']} instances in {dt:.1f}s (need 0, < 60s)")


def test_criterion_02_endpoint_convention():
    f = derive_trial_field(SEED + 2, 0)
    uu = last_passage_time(f, (5, -3), (5, -3))
    one = last_passage_time(f, (0, 0), (1, 0))
    x0 = weight_at(f, (0, 0))
    report("criterion 2 endpoint convention", uu == 0.0 and one == x0,
           f"T(u,u)={uu!r}, T(o,(1,0))={one!r}, X_o={x0!r} (exact equality)")


def test_criterion_03_lln_centering():
    n = 1000
    ratios = np.array([last_passage_time(derive_trial_field(SEED + 3, i), (0, 0), (n, n)) / n
                       for i in range(200)])
    m = ratios.mean()
    report("criterion 3 LLN centering", 3.5 <= m <= 4.0 and m < 4,
           f"mean T/n = {m:.4f} over 200 trials at n=1000 (need [3.5, 4.0] and < 4)")


def test_criterion_04_scaling_exponents():
    grid = [128, 256, 512, 1024, 2048]
    samples = scaling_samples(grid, 400, SEED + 4, path=True)
    tf = fit_power_law(grid, list(scaling_summary("tf", samples).values()))
    iqr = fit_power_law(grid, list(scaling_summary("temporal", samples).values()))
    ok = abs(tf.alpha - 2 / 3) <= 0.08 and abs(iqr.alpha - 1 / 3) <= 0.08
    report("criterion 4 scaling exponents", ok,
           f"TF median slope {fmt(tf.alpha)} (2/3 +- 0.08, R2 {fmt(tf.r2)}); "
           f"T IQR slope {fmt(iqr.alpha)} (1/3 +- 0.08, R2 {fmt(iqr.r2)}); 400 trials per n")


def test_criterion_05_local_tf_tail(tail_sample):
    grid = [round(0.8 + 0.1 * k, 10) for k in range(17)]
    curve = curve_from_values("tf_local", scaled_values("tf_local", tail_sample, 1024, 256), grid)
    cubic, half = fit_tail_exponent(curve, 3), fit_tail_exponent(curve, 1.5)
    low = [row for row in curve.rows if row.t <= 2.0 + 1e-9]
    positive = all(row.p_hat > 0 and row.ci_low > 0 for row in low)
    ok = cubic.r2 >= 0.9 and cubic.r2 > half.r2 and positive
    report("criterion 5 local TF tail shape", ok,
           f"R2(beta=3)={fmt(cubic.r2)} (need >= 0.9), R2(beta=3/2)={fmt(half.r2)} (need < beta=3), "
           f"c={fmt(cubic.c)}; min ci_low for t<=2 = {fmt(min(r.ci_low for r in low))} (need > 0); "
           f"{len(tail_sample)} trials, r=256, n=1024")


def test_criterion_06_temporal_tails(tail_sample):
    upper_grid = [0.5 * k for k in range(1, 7)]
    lower_grid = [5 + 0.5 * k for k in range(9)]
    values = scaled_values("temporal_upper", tail_sample, 1024)
    up = curve_from_values("temporal_upper", values, upper_grid)
    lo = curve_from_values("temporal_lower", values, lower_grid)
    up_right, up_swap = fit_tail_exponent(up, 1.5), fit_tail_exponent(up, 3)
    lo_right, lo_swap = fit_tail_exponent(lo, 3), fit_tail_exponent(lo, 1.5)
    ok = (up_right.r2 >= 0.85 and lo_right.r2 >= 0.85
          and up_right.r2 > up_swap.r2 and lo_right.r2 > lo_swap.r2)
    report("criterion 6 temporal tails", ok,
           f"upper R2(3/2)={fmt(up_right.r2)} vs R2(3)={fmt(up_swap.r2)}; "
           f"lower R2(3)={fmt(lo_right.r2)} vs R2(3/2)={fmt(lo_swap.r2)} "
           f"(need >= 0.85 and correct > swapped); {len(values)} trials at n=1024")


@pytest.mark.parametrize("r,t,n", [(512, 1.0, 1024), (729, 1.5, 2187)])
def test_criterion_07_event_calculus(r, t, n):
    spec = CampaignSpec("audit_suite", 500, SEED + 7, n=n, r=r, t=t)
    recs = run_trials(spec, audit_trial(spec))
    bad = [(rec.trial_index, rec.payload["violations"]) for rec in recs if rec.payload["violations"]]
    fired = {}
    for rec in recs:
        for ch in rec.payload["checks"]:
            fired[ch["name"]] = fired.get(ch["name"], 0) + ch["antecedent"]
    report(f"criterion 7 event calculus (r={r}, t={t}, n={n})", not bad,
           f"{len(bad)} violating trials of {len(recs)} (need 0); antecedent counts {fired}"
           + (f"; first {bad[:3]}" if bad else ""))


def test_criterion_08_structural_independence():
    rep = independence_audit(SEED + 8, build_construction(512, 1.0, 1024), 100)
    report("criterion 8 structural independence", rep.violations == 0,
           f"changes {rep.changed} over {rep.pairs} hybrid pairs (need all 0)")


def test_criterion_09_symmetry_and_mass(events_r512_t2):
    table = event_table(events_r512_t2)
    pe, per = table["E"]["p_hat"], table["E_R"]["p_hat"]
    ok = abs(pe - 0.5) <= 0.05 and per >= 0.2
    report("criterion 9 symmetry and E^R mass", ok,
           f"P(E)={fmt(pe)} (need 0.5 +- 0.05), P(E^R)={fmt(per)} (need >= 0.2); "
           f"{len(events_r512_t2)} trials at r=512, n=1024, t=2, crossing 2r")


def test_event_probabilities_near_one(events_r512_t2):
    """Companion invariant: P(B), P(C), P(D) >= 0.9 at t=2, r=512."""
    table = event_table(events_r512_t2)
    ps = {k: table[k]["p_hat"] for k in "BCD"}
    c = build_construction(512, 2.0, 1024)
    report("invariant P(B), P(C), P(D) >= 0.9", all(p >= 0.9 for p in ps.values()),
           f"{ps} at r=512, t=2 (u={tuple(c.u)}, v={tuple(c.v)}, chain feasible: {c.feasible})")


def _cli_bytes(threads, tmp_path):
    out = tmp_path / f"w{threads}.jsonl"
    cmd = [sys.executable, "-m", "lpplab.cli", "tails", "--stat", "tf-local", "--r", "64",
           "--n", "256", "--t", "0.5:2.5:0.5", "--trials", "300", "--seed", str(SEED),
           "--threads", str(threads), "--out", str(out)]
    subprocess.run(cmd, check=True)
    return out.read_bytes()


_CAPPED = """
import resource, sys
import numpy as np
from lpplab import derive_trial_field, last_passage_time
n, headroom = int(sys.argv[1]), int(sys.argv[2]) << 20
f = derive_trial_field(1, 1)
last_passage_time(f, (0, 0), (64, 64))
vm = int(next(l for l in open("/proc/self/status") if l.startswith("VmSize")).split()[1]) << 10
resource.setrlimit(resource.RLIMIT_AS, (vm + headroom, resource.RLIM_INFINITY))
try:
    np.ones((n, n))
    control = "allocated"
except MemoryError:
    control = "refused"
last_passage_time(f, (0, 0), (n, n))
print(control)
"""


def _run_capped(n, headroom_mib):
    """Run last_passage_time at size n with the address space capped at the
    current size plus ``headroom_mib``; an n x n float table cannot fit."""
    return subprocess.run([sys.executable, "-c", _CAPPED, str(n), str(headroom_mib)],
                          capture_output=True, text=True)


def test_criterion_10_determinism_and_performance(tmp_path):
    same = _cli_bytes(1, tmp_path) == _cli_bytes(8, tmp_path)
    trial_statistics(derive_trial_field(SEED, 0), 256, 64)
    t0 = time.perf_counter()
    trial_statistics(derive_trial_field(SEED, 1), 2048, 512)
    dt = time.perf_counter() - t0
    n, headroom = 4096, 32
    capped = _run_capped(n, headroom)
    linear = capped.returncode == 0 and capped.stdout.strip() == "refused"
    ok = same and dt <= 2.0 and linear
    report("criterion 10 determinism and performance", ok,
           f"1 vs 8 workers byte-identical: {same}; n=2048 trial {dt:.2f}s (need <= 2s); "
           f"last_passage_time n={n} under a {headroom} MiB cap: "
           f"{'completed' if capped.returncode == 0 else 'failed'} "
           f"(control n x n table {capped.stdout.strip() or capped.stderr.strip()[-80:]})")


def test_criterion_10_geodesic_trial_memory():
    """Per-trial memory of a geodesic trial must grow linearly in n."""
    peaks = {}
    f = derive_trial_field(SEED, 2)
    trial_statistics(f, 64, 16)
    for n in (2048, 4096):
        tracemalloc.start()
        trial_statistics(f, n, n // 4)
        peaks[n] = tracemalloc.get_traced_memory()[1]
        tracemalloc.stop()
    ratio = peaks[4096] / peaks[2048]
    report("criterion 10 geodesic trial memory O(n)", ratio <= 2.5,
           f"traced peak {peaks[2048] // 1024} KiB at n=2048, {peaks[4096] // 1024} KiB at n=4096 "
           f"(ratio {ratio:.2f}; linear is 2, the n^2/8-byte backpointer store gives 4)")
