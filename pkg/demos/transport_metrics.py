"""
Two routes to the same transport distance, and a metric that can vanish
=======================================================================

On the line the W1 distance between atomic measures is an integral of the
gap between cumulative distributions, no optimization needed.  The same
number also comes out of a small linear program.  The library keeps both
routes; cross-checking them is the cheapest end-to-end test of the
transport layer there is.

Lifted measures (position, velocity pairs) carry a second, weaker
quantity: among all couplings that move the feet optimally, the least
velocity discrepancy.  Two lifted measures with the same speeds at
different feet are genuinely different, yet this quantity is zero.
"""

import numpy as np

from mdelab import fiber_pseudometric, lifted_w1, make_lifted, make_measure
from mdelab.transport import w1_distance

rng = np.random.default_rng(3)


def rand_measure(m):
    xs = rng.uniform(-4.0, 4.0, size=(m, 1))
    ws = rng.uniform(0.1, 1.0, size=m)
    return make_measure(xs, ws / ws.sum())


print("quantile route vs linear-program route:")
print(f"{'atoms':>6} {'quantile':>12} {'simplex':>12} {'|diff|':>10}")
for m in (2, 5, 9, 14):
    a, b = rand_measure(m), rand_measure(m + 3)
    fast = w1_distance(a, b, method="quantile")
    exact = w1_distance(a, b, method="lp")
    print(f"{m:>6} {fast:12.8f} {exact:12.8f} {abs(fast - exact):10.2e}")

# same speeds, shifted feet: the lifted distance sees the shift, the fiber
# comparison does not
v1 = make_lifted([[0.0]], [[5.0]], [1.0])
v2 = make_lifted([[1.0]], [[5.0]], [1.0])
print("\nunit masses with speed 5 at x=0 and x=1:")
print(f"  lifted W1          = {lifted_w1(v1, v2):.3f}")
print(f"  fiber pseudometric = {fiber_pseudometric(v1, v2):.3f}")
