"""Time-stepping schemes for measure dynamics driven by velocity fibers.

Three one-step rules advance a measure mu by dt under a fiber rule V:

* ``las_run`` (lattice scheme): mass is first binned onto the space grid
  of step dx = dt * dv, fibers are binned onto the velocity grid of step
  dv, and every grid atom x_i spawns children at x_i + dt * v_j weighted
  by the binned fiber mass.  Because dt * dv = dx, children land on the
  space grid again, so the scheme lives on a fixed lattice.
* ``lagrangian_run``: every atom splits along its exact fiber, children at
  x + dt * v.  Grid-free; the support can grow geometrically.
* ``mean_velocity_run``: every atom moves by dt times its fiber mean, so
  the atom count never grows.  Fiber spread is invisible to this scheme,
  which is exactly what makes it a useful contrast case.

Runs record the node measures plus, per step, the lifted measure that
generated it, which is what linear-in-time interpolation and trajectory
reconstruction consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BaseOffGridError,
    OutOfRangeError,
    SupportBlowupError,
)
from .measures import (
    MERGE_TOL,
    DiscreteMeasure,
    LiftedMeasure,
    base_of,
    coalesce,
    support_radius,
)
from .pvf import PvfSpec, barycentric_field, eval_pvf

LAS = "las"
LAGRANGIAN = "lagrangian"
MEAN_VELOCITY = "mean-velocity"
SCHEMES = (LAS, LAGRANGIAN, MEAN_VELOCITY)

# Cell-membership tolerance, in units of the grid step: values within
# 1e-9 of a cell boundary from below bin upward.  This keeps mathematically
# exact bin values (velocity 1 with dv = 1/7, say) stable under float dust.
CELL_TOL = 1e-9

_TIME_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Time, velocity and space steps of the lattice scheme.

    ``dt = T / N`` and ``dx = dt * dv`` always; ``dv`` defaults to 1/N,
    the standard refinement convention, and may be overridden to express
    unit-grid runs (dt = dv = 1 over several steps, for instance).
    """

    T: float
    N: int
    dv: float = None  # type: ignore[assignment]  # filled in __post_init__

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 1):
            raise ValueError("N must be a positive integer")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "N", int(self.N))
        dv = 1.0 / self.N if self.dv is None else float(self.dv)
        if not dv > 0:
            raise ValueError("dv must be positive")
        object.__setattr__(self, "dv", dv)
        if abs(self.N * self.dt - self.T) > _TIME_TOL * max(1.0, self.T):
            raise ValueError("N * dt must reproduce T")

    @property
    def dt(self) -> float:
        return self.T / self.N

    @property
    def dx(self) -> float:
        return self.dt * self.dv


@dataclass(frozen=True)
class SchemeConfig:
    """Which scheme to run and with what housekeeping parameters."""

    scheme: str
    grid: GridSpec
    coalesce_tol: float = MERGE_TOL
    prune_floor: float = 0.0
    max_atoms: int = 1_000_000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.coalesce_tol < 0:
            raise ValueError("coalesce_tol must be >= 0")
        if not 0.0 <= self.prune_floor <= 1e-6:
            raise ValueError("prune_floor must lie in [0, 1e-6]")
        if self.max_atoms < 1:
            raise ValueError("max_atoms must be >= 1")


@dataclass(frozen=True, eq=False)
class MeasurePath:
    """A discrete-time run: node measures plus per-interval lifted data.

    ``interp[k]`` is the lifted measure over ``measures[k]`` whose atoms,
    transported for time t - times[k], realize the run on the k-th
    interval; its base equals the node measure.
    """

    times: np.ndarray
    measures: tuple[DiscreteMeasure, ...]
    interp: tuple[LiftedMeasure, ...]
    pruned_mass: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).ravel()
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        if times.shape[0] < 2:
            raise ValueError("a path needs at least two node times")
        if abs(times[0]) > _TIME_TOL:
            raise ValueError("paths start at time zero")
        if np.any(np.diff(times) <= 0):
            raise ValueError("node times must increase")
        if len(self.measures) != times.shape[0]:
            raise ValueError("one measure per node time required")
        if len(self.interp) != times.shape[0] - 1:
            raise ValueError("one lifted measure per interval required")
        d = self.measures[0].dim
        for mu in self.measures:
            if mu.dim != d:
                raise ValueError("node measures must share a dimension")
        for k, lifted in enumerate(self.interp):
            if not base_of(lifted).allclose(self.measures[k], tol=1e-9):
                raise ValueError(f"interval {k}: lifted base != node measure")

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        return self.measures[0].dim

    def __repr__(self) -> str:
        return (
            f"MeasurePath(nodes={len(self.measures)}, dim={self.dim}, "
            f"T={self.T:g})"
        )


# ---------------------------------------------------------------------------
# grid snapping
# ---------------------------------------------------------------------------

def _bin_indices(values: np.ndarray, step: float) -> np.ndarray:
    """Cell index of each value for half-open cells [k step, (k+1) step)."""
    return np.floor(values / step + CELL_TOL)


def snap_space(mu: DiscreteMeasure, grid: GridSpec) -> DiscreteMeasure:
    """Bin atoms onto the space grid of step dx (cells anchored at 0)."""
    idx = _bin_indices(mu.atoms, grid.dx)
    return DiscreteMeasure(idx * grid.dx, mu.weights)


def snap_velocity(lifted: LiftedMeasure, grid: GridSpec) -> LiftedMeasure:
    """Bin the velocities of a lifted measure onto the dv grid.

    Positions must already sit on the space grid (within 1e-9); they are
    passed through untouched, so the base measure is preserved.
    """
    pos = lifted.positions
    nearest = np.rint(pos / grid.dx) * grid.dx
    if float(np.max(np.abs(pos - nearest), initial=0.0)) > 1e-9:
        raise BaseOffGridError("base atoms are not on the space grid")
    idx = _bin_indices(lifted.velocities, grid.dv)
    return LiftedMeasure(pos, idx * grid.dv, lifted.weights)


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------

def _check_atom_budget(count: int, cfg: SchemeConfig) -> None:
    if count > cfg.max_atoms:
        raise SupportBlowupError(
            f"{count} atoms exceed the cap of {cfg.max_atoms}"
        )


def _prune(mu: DiscreteMeasure, floor: float) -> tuple[DiscreteMeasure, float]:
    if floor <= 0.0:
        return mu, 0.0
    drop = mu.weights < floor
    if not drop.any():
        return mu, 0.0
    lost = float(mu.weights[drop].sum())
    return DiscreteMeasure(mu.atoms[~drop], mu.weights[~drop]), lost


def las_run(spec: PvfSpec, mu0: DiscreteMeasure, cfg: SchemeConfig) -> MeasurePath:
    """Run the lattice scheme for N steps of dt from a snapped initial datum.

    Node positions are handled in integer lattice coordinates, so atoms
    sit exactly on multiples of dx and recombining children coincide
    exactly (binomial-type weights come out in exact dyadic arithmetic).
    """
    if cfg.scheme != LAS:
        raise ValueError("cfg.scheme must be 'las'")
    grid = cfg.grid
    mu = snap_space(mu0, grid)
    measures = [mu]
    lifts: list[LiftedMeasure] = []
    for _ in range(grid.N):
        lifted = snap_velocity(eval_pvf(spec, mu), grid)
        _check_atom_budget(lifted.natoms, cfg)
        # the weight floor may trim lift tails whose joint weights dip
        # below it; the node a lift covers is the base of the lift used
        measures[-1] = base_of(lifted)
        ix = np.rint(lifted.positions / grid.dx)
        iv = np.rint(lifted.velocities / grid.dv)
        mu = DiscreteMeasure((ix + iv) * grid.dx, lifted.weights)
        lifts.append(lifted)
        measures.append(mu)
    times = grid.dt * np.arange(grid.N + 1)
    return MeasurePath(times, tuple(measures), tuple(lifts))


def lagrangian_run(spec: PvfSpec, mu0: DiscreteMeasure, cfg: SchemeConfig) -> MeasurePath:
    """Split every atom along its exact fiber, children at x + dt v."""
    if cfg.scheme != LAGRANGIAN:
        raise ValueError("cfg.scheme must be 'lagrangian'")
    grid = cfg.grid
    mu = mu0
    measures = [mu]
    lifts: list[LiftedMeasure] = []
    pruned = 0.0
    for _ in range(grid.N):
        lifted = eval_pvf(spec, mu)
        _check_atom_budget(lifted.natoms, cfg)
        measures[-1] = base_of(lifted)  # floor-trimmed lift tails, as in las_run
        mu = DiscreteMeasure(
            lifted.positions + grid.dt * lifted.velocities, lifted.weights
        )
        if cfg.coalesce_tol > MERGE_TOL:
            mu = coalesce(mu, cfg.coalesce_tol)
        mu, lost = _prune(mu, cfg.prune_floor)
        pruned += lost
        _check_atom_budget(mu.natoms, cfg)
        lifts.append(lifted)
        measures.append(mu)
    times = grid.dt * np.arange(grid.N + 1)
    return MeasurePath(times, tuple(measures), tuple(lifts), pruned_mass=pruned)


def mean_velocity_run(spec: PvfSpec, mu0: DiscreteMeasure, cfg: SchemeConfig) -> MeasurePath:
    """Move every atom by dt times its mean fiber velocity.

    The interval data records the fiber means as one-point fibers, so the
    run is its own straight-line interpolation; the atom count never
    increases.
    """
    if cfg.scheme != MEAN_VELOCITY:
        raise ValueError("cfg.scheme must be 'mean-velocity'")
    grid = cfg.grid
    mu = mu0
    measures = [mu]
    lifts: list[LiftedMeasure] = []
    for _ in range(grid.N):
        vbar = barycentric_field(spec, mu)
        lifted = LiftedMeasure(mu.atoms, vbar, mu.weights)
        mu = DiscreteMeasure(mu.atoms + grid.dt * vbar, mu.weights)
        lifts.append(lifted)
        measures.append(mu)
    times = grid.dt * np.arange(grid.N + 1)
    return MeasurePath(times, tuple(measures), tuple(lifts))


_RUNNERS = {LAS: las_run, LAGRANGIAN: lagrangian_run, MEAN_VELOCITY: mean_velocity_run}


def run_scheme(spec: PvfSpec, mu0: DiscreteMeasure, cfg: SchemeConfig) -> MeasurePath:
    """Dispatch to the runner named by ``cfg.scheme``."""
    return _RUNNERS[cfg.scheme](spec, mu0, cfg)


# ---------------------------------------------------------------------------
# evaluation along a path
# ---------------------------------------------------------------------------

def interpolate_at(path: MeasurePath, t: float) -> DiscreteMeasure:
    """The path's measure at any time in [0, T].

    Node times return the node measures; interior times transport the
    interval's lifted atoms linearly, x + (t - t_k) v.
    """
    t = float(t)
    times = path.times
    if t < times[0] - _TIME_TOL or t > times[-1] + _TIME_TOL:
        raise OutOfRangeError(f"t={t:g} outside [{times[0]:g}, {times[-1]:g}]")
    k = int(np.argmin(np.abs(times - t)))
    if abs(times[k] - t) <= _TIME_TOL:
        return path.measures[k]
    k = int(np.searchsorted(times, t) - 1)
    lifted = path.interp[k]
    return DiscreteMeasure(
        lifted.positions + (t - times[k]) * lifted.velocities, lifted.weights
    )


def support_bound_check(path: MeasurePath, C: float, R: float) -> bool:
    """True when every node's support radius is <= exp(C T) (R + 1).

    ``C`` should be a growth constant of the driving rule (see
    ``sublinearity_bound``) and ``R`` at least the initial support radius.
    """
    bound = float(np.exp(C * path.T) * (R + 1.0))
    return all(support_radius(mu) <= bound for mu in path.measures)
