"""
Grid refinement selects a branch of a non-unique flow
=====================================================

The field v(x) = 2 sqrt(|x|) has infinitely many flows through the origin:
arrive at 0, wait any amount of time, then leave along a parabola.  The
lattice scheme resolves the ambiguity mechanically.  Velocities snap down
to multiples of dv, so what the scheme does at the origin is decided by
the first cell boundary the growing speed manages to cross.

On the unit grid the single atom marches -1, 1, 3, 6.  Refining dt = dv
keeps one atom but bends the polygon: each refinement level picks its own
lattice branch, and the selected velocity at x is always the snapped value
floor(2 sqrt(|x|) / dv) dv.
"""

import numpy as np

from mdelab import GridSpec, SchemeConfig, run_scheme
from mdelab.scenarios import get_scenario

scn = get_scenario("peano")
spec, mu0 = scn.pvf_spec(), scn.initial_measure()

print("single atom under v = 2 sqrt(|x|), started at -1, T = 3\n")
trails = {}
for gi in range(len(scn.Ns)):
    grid = scn.grid(gi)
    path = run_scheme(spec, mu0, SchemeConfig(scheme="las", grid=grid))
    xs = [mu.atoms[0, 0] for mu in path.measures]
    trails[grid.dv] = (path.times, xs)
    nodes = "  ".join(f"{x:+.3f}" for x in xs)
    print(f"dv = {grid.dv:.3f}: {nodes}")

print("\nvelocity snapping at each visited point (dv = 0.5 run):")
times, xs = trails[0.5]
for xk, xk1, t in zip(xs, xs[1:], times):
    v = (xk1 - xk) / (times[1] - times[0])
    print(f"  t = {t:.1f}  x = {xk:+.3f}  raw speed {2 * np.sqrt(abs(xk)):.3f}"
          f"  snapped {v:+.2f}")

# optional picture: the three polygons leave the origin along different arcs
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for dv, (ts, xs) in sorted(trails.items()):
        ax.plot(ts, xs, marker="o", label=f"dv = {dv:.3f}")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.legend()
    fig.tight_layout()
    fig.savefig("peano_branches.png", dpi=120)
    print("\nwrote peano_branches.png")
except ImportError:
    pass
