"""
Weight fields
=============

Every vertex of Z^2 carries an Exp(1) weight.  Nothing is stored: a weight
is a hash of (seed, trial, x, y), so any vertex can be queried in any order
and two runs with the same seed agree bit for bit.
"""

import numpy as np
from scipy import stats

from lpplab import AxisBox, derive_trial_field, hybrid_field, weight_at, weights, with_discount

field = derive_trial_field(master_seed=7, trial_index=0)
print("X(3,5) =", weight_at(field, (3, 5)), "and again:", weight_at(field, (3, 5)))

# a million weights from a 1000 x 1000 block
ys, xs = np.divmod(np.arange(10**6), 1000)
w = weights(field, xs, ys)
print(f"mean {w.mean():.4f}   P(X > 2) = {np.mean(w > 2):.4f}  (e^-2 = {np.exp(-2):.4f})")
print("KS distance to Exp(1):", round(stats.kstest(w[:10**5], "expon").statistic, 5))

# Discounting zeroes a region and leaves everything else alone.
box = AxisBox(0, 2, 0, 2)
cut = with_discount(field, box)
print("\ndiscounted 4x4 corner:")
print(np.round(weights(cut, *np.divmod(np.arange(16), 4)[::-1]).reshape(4, 4), 2))

# Hybrids splice two independent fields along a region.
other = derive_trial_field(7, 1)
mix = hybrid_field(other, field, box)
print("\ninside the box the hybrid reads trial 1:", weight_at(mix, (1, 1)) == weight_at(other, (1, 1)))
print("outside it reads trial 0:           ", weight_at(mix, (5, 1)) == weight_at(field, (5, 1)))
