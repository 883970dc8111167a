"""
Scaling exponents
=================

The geodesic wanders n^(2/3) away from the diagonal and the passage time
fluctuates on the n^(1/3) scale.  Fitting log(median TF) and log(IQR of T)
against log n recovers both exponents.
"""

from lpplab.montecarlo import fit_power_law, scaling_samples, scaling_summary

grid = [64, 128, 256, 512]
samples = scaling_samples(grid, trials=150, master_seed=4)
for stat, target in (("tf", 2 / 3), ("temporal", 1 / 3)):
    summary = scaling_summary(stat, samples)
    fit = fit_power_law(grid, list(summary.values()))
    print(f"{stat:9s} summaries {[round(v, 1) for v in summary.values()]}")
    print(f"          slope {fit.alpha:.3f} (theory {target:.3f}), R2 {fit.r2:.3f}")
