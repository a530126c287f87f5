"""Diagnostics for scheme runs: weak residuals, convergence, comparisons.

The residual check measures how far a recorded path is from solving the
evolution law in the weak sense: for a smooth bump f, the change of
⟨mu_t, f⟩ should equal the time integral of the mean of grad f(x)·v under
the velocity rule evaluated along the path.  The integrand is only known
at node measures, so the integral is a trapezoid sum over nodes; the
defect therefore carries an O(dt) quadrature floor and the useful signal
is how it scales with N, not its absolute size.

Convergence studies and scheme comparisons both reduce paths to tables of
sup-over-node-times Wasserstein-1 numbers, ready for CSV plotting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import EmptyInputError
from .measures import DiscreteMeasure
from .pvf import PvfSpec, eval_pvf
from .schemes import (
    SCHEMES,
    GridSpec,
    MeasurePath,
    SchemeConfig,
    interpolate_at,
    run_scheme,
)
from .transport import w1_distance

# sup of |grad f| for the cubic bump, attained at |x-c| = r/sqrt(5)
_GRAD_SUP = 96.0 / (25.0 * np.sqrt(5.0))


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported cubic bump centered at c with radius r.

    f(x) = (max(0, 1 - |x-c|^2/r^2))^3.  Twice continuously
    differentiable, zero outside the ball B(c, r).
    """

    __test__ = False  # not a pytest collectible despite the name

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float)).ravel()
        r = float(self.radius)
        if not (r > 0 and np.isfinite(r)):
            raise ValueError("radius must be positive and finite")
        if not np.all(np.isfinite(c)):
            raise ValueError("center must be finite")
        c = c + 0.0
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def value(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        s = 1.0 - np.sum((pts - self.center) ** 2, axis=1) / self.radius**2
        return np.maximum(s, 0.0) ** 3

    def gradient(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        diff = pts - self.center
        s = np.maximum(1.0 - np.sum(diff**2, axis=1) / self.radius**2, 0.0)
        return (-6.0 / self.radius**2) * s[:, None] ** 2 * diff

    def lipschitz_bound(self) -> float:
        """Exact sup-norm of the gradient (well below the crude 6/r)."""
        return _GRAD_SUP / self.radius


def default_test_family(measures: Sequence[DiscreteMeasure]) -> list[TestFunction]:
    """Nine overlapping bumps covering the support hull, inflated by 20%.

    Centers sit on a uniform 9-point grid along the hull box diagonal
    (which in one dimension is just the inflated interval); the common
    radius is the inflated hull diameter, so every bump sees all the mass
    and no movement escapes the family.  Degenerate hulls fall back to
    radius 1.
    """
    if len(measures) == 0:
        raise EmptyInputError("need at least one measure to size the family")
    lo = np.min([m.atoms.min(axis=0) for m in measures], axis=0)
    hi = np.max([m.atoms.max(axis=0) for m in measures], axis=0)
    mid = (lo + hi) / 2.0
    half = 1.2 * (hi - lo) / 2.0
    lo, hi = mid - half, mid + half
    width = float(np.linalg.norm(hi - lo))
    if width <= 0:
        width = 1.0
    fracs = np.linspace(0.0, 1.0, 9)
    return [TestFunction(center=lo + f * (hi - lo), radius=width) for f in fracs]


@dataclass(frozen=True)
class ResidualReport:
    """Weak-form defects of one path, per test function and node time."""

    times: np.ndarray
    defects: np.ndarray
    max_defect: float
    dt: float
    family_description: str

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "defects", np.asarray(self.defects, dtype=float))

    @property
    def nfunctions(self) -> int:
        return self.defects.shape[0]


def residual(
    path: MeasurePath, spec: PvfSpec, family: Optional[Sequence[TestFunction]] = None
) -> ResidualReport:
    """Defect |⟨mu_k, f⟩ - ⟨mu_0, f⟩ - Trap_k| per bump f and node k.

    Trap_k is the trapezoid sum over nodes 0..k of the mean of
    grad f(x)·v under the velocity rule re-evaluated at each node measure.
    Re-evaluation (rather than reusing the stored interval lifts) makes
    this a test of the path as a candidate solution, independent of the
    scheme that produced it.
    """
    if family is None:
        family = default_test_family(path.measures)
    family = list(family)
    if not family:
        raise EmptyInputError("test family is empty")
    times = path.times
    nnodes = times.shape[0]
    lifts = [eval_pvf(spec, mu) for mu in path.measures]
    defects = np.zeros((len(family), nnodes))
    for fi, f in enumerate(family):
        integrand = np.array(
            [
                float(np.sum(np.sum(f.gradient(lf.positions) * lf.velocities, axis=1) * lf.weights))
                for lf in lifts
            ]
        )
        values = np.array([mu.integrate(f.value) for mu in path.measures])
        steps = np.diff(times)
        trap = np.concatenate(
            [[0.0], np.cumsum(steps * (integrand[:-1] + integrand[1:]) / 2.0)]
        )
        defects[fi] = np.abs(values - values[0] - trap)
    dt = float(np.max(np.diff(times)))
    desc = (
        f"{len(family)} cubic bumps, radius {family[0].radius:g}"
        if len({f.radius for f in family}) == 1
        else f"{len(family)} cubic bumps, mixed radii"
    )
    return ResidualReport(
        times=times,
        defects=defects,
        max_defect=float(defects.max()),
        dt=dt,
        family_description=desc,
    )


@dataclass(frozen=True)
class ConvergenceTable:
    """sup-over-time W1 errors across a refinement sweep.

    ``mode`` is "reference" (one error per N, against a known limit) or
    "successive" (one error per consecutive pair, keyed by the coarser N).
    """

    scheme: str
    T: float
    Ns: tuple[int, ...]
    errors: tuple[float, ...]
    mode: str

    def rows(self):
        return list(zip(self.Ns, self.errors))


ReferenceLike = Union[MeasurePath, Callable[[float], DiscreteMeasure]]


def convergence_study(
    spec: PvfSpec,
    mu0: DiscreteMeasure,
    scheme: str,
    Ns: Sequence[int],
    T: float,
    reference: Optional[ReferenceLike] = None,
) -> ConvergenceTable:
    """Errors of ``scheme`` runs over increasing N, all at standard grids.

    With a reference (path or callable t -> measure), each run is compared
    against it at the coarsest run's node times.  Without one, consecutive
    runs are compared with each other at the coarser run's node times.
    """
    Ns = [int(n) for n in Ns]
    if len(Ns) == 0:
        raise EmptyInputError("need at least one N")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("Ns must be strictly increasing")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    paths = [
        run_scheme(spec, mu0, SchemeConfig(scheme=scheme, grid=GridSpec(T=T, N=n)))
        for n in Ns
    ]
    if reference is not None:
        ref = (
            (lambda t: interpolate_at(reference, t))
            if isinstance(reference, MeasurePath)
            else reference
        )
        eval_times = paths[0].times
        errors = tuple(
            float(
                max(
                    w1_distance(interpolate_at(p, t), ref(float(t)))
                    for t in eval_times
                )
            )
            for p in paths
        )
        return ConvergenceTable(
            scheme=scheme, T=float(T), Ns=tuple(Ns), errors=errors, mode="reference"
        )
    if len(Ns) < 2:
        raise ValueError("successive mode needs at least two Ns")
    errors = tuple(
        float(
            max(
                w1_distance(interpolate_at(coarse, t), interpolate_at(fine, t))
                for t in coarse.times
            )
        )
        for coarse, fine in zip(paths, paths[1:])
    )
    return ConvergenceTable(
        scheme=scheme, T=float(T), Ns=tuple(Ns[:-1]), errors=errors, mode="successive"
    )


@dataclass(frozen=True)
class ComparisonTable:
    """Pairwise sup-over-node-times W1 gaps between schemes at one grid."""

    N: int
    T: float
    pairs: tuple[tuple[str, str], ...]
    gaps: tuple[float, ...]

    def gap(self, a: str, b: str) -> float:
        for (pa, pb), g in zip(self.pairs, self.gaps):
            if {pa, pb} == {a, b}:
                return g
        raise KeyError((a, b))

    def rows(self):
        return [(a, b, g) for (a, b), g in zip(self.pairs, self.gaps)]


def scheme_compare(
    spec: PvfSpec, mu0: DiscreteMeasure, N: int, T: float
) -> ComparisonTable:
    """Run all three schemes on the same grid and tabulate pairwise gaps."""
    grid = GridSpec(T=T, N=N)
    runs = {
        tag: run_scheme(spec, mu0, SchemeConfig(scheme=tag, grid=grid))
        for tag in SCHEMES
    }
    tags = list(SCHEMES)
    pairs = []
    gaps = []
    for i, a in enumerate(tags):
        for b in tags[i + 1 :]:
            gap = max(
                w1_distance(ma, mb)
                for ma, mb in zip(runs[a].measures, runs[b].measures)
            )
            pairs.append((a, b))
            gaps.append(float(gap))
    return ComparisonTable(N=int(N), T=float(T), pairs=tuple(pairs), gaps=tuple(gaps))
