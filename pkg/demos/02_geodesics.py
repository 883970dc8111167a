"""
Passage times and geodesics
===========================

T(u, v) is the heaviest up-right path from u to v, counting every vertex
except the last.  The sweep runs along antidiagonals x + y = const and
keeps a single frontier, so passage times need O(n) memory.
"""

import time

from lpplab import (Rectangle, band, brute_force_passage, constrained_passage,
                    derive_trial_field, discounted_passage, f_expected, geodesic,
                    last_passage_time, weight_at)

field = derive_trial_field(3, 0)
o = (0, 0)

print("T(o,o) =", last_passage_time(field, o, o))
print("T(o,(1,0)) =", last_passage_time(field, o, (1, 0)), "= X_o =", weight_at(field, o))

# Small boxes can be enumerated.  The sweep agrees exactly, including the path.
fast = geodesic(field, o, (6, 6))
slow_time, slow_path = brute_force_passage(field, o, (6, 6))
print("\n6x6: sweep", fast.passage_time, " enumeration", slow_time, " same path:", fast == slow_path)

# Paths can be confined to a region...
t, path = constrained_passage(field, o, (6, 6), band(-1, 1))
print("inside |psi| <= 1:", round(t, 4), "path", [tuple(p) for p in path.points()])

# ...or made to see zero weight inside one.
t, path = discounted_passage(field, o, (30, 30), Rectangle(20, 40, -6, 6))
print("diagonal strip discounted:", round(t, 3), " closest |psi| along the strip:",
      int(abs(path.psi[(path.phi >= 20) & (path.phi <= 40)]).min()))

# At n = 2048 a full geodesic takes well under a second.
n = 2048
start = time.perf_counter()
g = geodesic(field, o, (n, n))
print(f"\nn={n}: T = {g.passage_time:.1f}, f = {f_expected(o, (n, n)):.0f}, "
      f"{time.perf_counter() - start:.2f}s")
