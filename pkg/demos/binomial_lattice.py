"""
Coin flips from a velocity fiber
================================

Give every point the same two-speed fiber (half the mass wants to go left
at speed 1, half right at speed 1) and run the lattice scheme with N time
steps of size 1/N.  Each step multiplies the support by a +-1/N shift with
probability one half each, so node k carries exactly the law of a centered
random walk: weights C(k, i) 2^-k on the lattice (2i - k)/N.

The walk's endpoint concentrates at the origin like 1/sqrt(N); that rate
is visible already at modest N.
"""

from math import comb, sqrt

from mdelab import GridSpec, SchemeConfig, dirac, run_scheme, w1_distance
from mdelab.scenarios import get_scenario

spec = get_scenario("binomial").pvf_spec()
origin = dirac([0.0])

# small N: print the lattice law at the final node next to the exact one
N = 4
path = run_scheme(spec, origin, SchemeConfig(scheme="las", grid=GridSpec(T=1.0, N=N)))
final = path.measures[-1]
print(f"node {N} of the N={N} run (t = 1):")
for i in range(N + 1):
    x, w = (2 * i - N) / N, comb(N, i) / 2**N
    got_x, got_w = final.atoms[i, 0], final.weights[i]
    print(f"  x = {got_x:+.2f} (exact {x:+.2f})   w = {got_w:.4f} (exact {w:.4f})")

# larger N: distance to the origin shrinks like 1 / sqrt(N)
print("\nspread of the final node:")
print(f"{'N':>5} {'W1 to origin':>14} {'1/sqrt(N)':>11}")
for N in (16, 64, 256):
    path = run_scheme(
        spec, origin, SchemeConfig(scheme="las", grid=GridSpec(T=1.0, N=N))
    )
    spread = w1_distance(path.measures[-1], origin)
    print(f"{N:>5} {spread:14.6f} {1 / sqrt(N):11.6f}")
