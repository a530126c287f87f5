"""
Splitting a block of mass instead of a point
============================================

Start the splitting rule from the uniform distribution on [0, 1],
discretized as 256 equal atoms at the quantile midpoints.  The weighted
median sits at 1/2, so the left half of the block slides left and the
right half slides right; no atom ever changes sides.  At time t the exact
solution is the two half-blocks [-t, 1/2 - t] and [1/2 + t, 1 + t].
"""

import numpy as np

from mdelab import (
    GridSpec,
    SchemeConfig,
    make_measure,
    run_scheme,
    support_radius,
    w1_distance,
)
from mdelab.scenarios import get_scenario

scn = get_scenario("splitting-uniform")
spec, mu0 = scn.pvf_spec(), scn.initial_measure()
M, N = mu0.natoms, 64

path = run_scheme(spec, mu0, SchemeConfig(scheme="lagrangian", grid=GridSpec(T=1.0, N=N)))

print(f"uniform block of {M} atoms under the splitting rule, N={N}")
print(f"{'t':>6} {'atoms':>6} {'left edge':>10} {'gap width':>10} {'W1 to exact':>12}")
for k in (0, N // 4, N // 2, N):
    t = path.times[k]
    mu = path.measures[k]
    xs = mu.atoms[:, 0]
    half = M // 2
    gap = xs[half] - xs[half - 1] if mu.natoms == M else float("nan")
    shift = np.where(np.arange(M) < half, -t, t)
    exact_xs = (np.arange(M) + 0.5) / M + shift
    exact = make_measure(exact_xs[:, None], np.full(M, 1.0 / M))
    err = w1_distance(mu, exact)
    print(f"{t:6.3f} {mu.natoms:>6} {xs.min():10.4f} {gap:10.4f} {err:12.2e}")

print(f"\nsupport radius grew from {support_radius(mu0):.3f} "
      f"to {support_radius(path.measures[-1]):.3f}")
