"""Finitely supported probability measures on R^d and on R^d x R^d.

Two immutable value types live here.  ``DiscreteMeasure`` is a convex
combination of point masses on R^d.  ``LiftedMeasure`` is a point mass
distribution on position-velocity pairs; its projection onto the first
factor (the *base*) is again a ``DiscreteMeasure``, and grouping its atoms
by position yields one velocity distribution per base atom (the *fibers*).

Both types are kept in a canonical form so that equality checks, CSV dumps
and downstream grouping are deterministic:

* atoms sorted lexicographically by coordinates,
* atoms closer than ``MERGE_TOL`` in every coordinate merged (the group
  representative is its lexicographically first atom),
* weights normalized to total mass one, with atoms below ``WEIGHT_FLOOR``
  dropped and the rest renormalized,
* the backing arrays marked read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DimMismatchError, EmptyInputError, NegativeWeightError

# Absolute per-coordinate tolerance below which two atoms are the same atom.
MERGE_TOL = 1e-12
# Normalized weights strictly below this are dropped.
WEIGHT_FLOOR = 1e-15


# ---------------------------------------------------------------------------
# canonical form helpers
# ---------------------------------------------------------------------------

def _as_points(points) -> np.ndarray:
    """Coerce input to a (n, d) float array; 1-D input is read as n points in R^1."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ValueError(f"points must be a 1-D or 2-D array, got shape {pts.shape}")
    return pts


def _lex_perm(pts: np.ndarray) -> np.ndarray:
    """Permutation sorting rows lexicographically (first coordinate primary)."""
    # np.lexsort uses the LAST key as the primary one.
    return np.lexsort(pts.T[::-1])


def _greedy_groups(pts: np.ndarray, tol: float) -> tuple[np.ndarray, list[int]]:
    """Group lexicographically sorted rows, l-inf tolerance ``tol``.

    Scans rows in order.  A row joins the first existing group whose
    representative (the group's first row) is within ``tol`` in every
    coordinate; otherwise it opens a new group.  Because the input is
    sorted, candidate representatives are confined to the suffix whose
    first coordinate is >= row[0] - tol, which keeps the scan short.

    Returns (group id per row, representative row indices in group order).
    """
    n = pts.shape[0]
    gid = np.empty(n, dtype=np.intp)
    reps: list[int] = []
    for i in range(n):
        x0 = pts[i, 0]
        lo = len(reps)
        while lo > 0 and pts[reps[lo - 1], 0] >= x0 - tol:
            lo -= 1
        assigned = -1
        for k in range(lo, len(reps)):
            if np.max(np.abs(pts[reps[k]] - pts[i])) <= tol:
                assigned = k
                break
        if assigned < 0:
            reps.append(i)
            assigned = len(reps) - 1
        gid[i] = assigned
    return gid, reps


def canonical_support(points, weights, tol: float = MERGE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Return the canonical (atoms, weights) pair for a weighted point cloud.

    Sorts lexicographically, merges near-duplicates at ``tol``, normalizes
    the total mass to one, applies the weight floor and renormalizes.  The
    returned arrays are fresh, C-contiguous and read-only.

    Raises EmptyInputError when there are no atoms, NegativeWeightError for
    a negative weight, ValueError for shape mismatches or non-finite data.
    """
    pts = _as_points(points)
    w = np.asarray(weights, dtype=float).ravel()
    if pts.shape[0] == 0:
        raise EmptyInputError("a measure needs at least one atom")
    if pts.shape[0] != w.shape[0]:
        raise ValueError(f"{pts.shape[0]} atoms but {w.shape[0]} weights")
    if not np.all(np.isfinite(pts)):
        raise ValueError("atom coordinates must be finite")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w < 0):
        raise NegativeWeightError(f"negative weight {w.min()!r}")

    pts = pts + 0.0  # normalize -0.0 to +0.0 so sorting and dumps are stable
    perm = _lex_perm(pts)
    pts = np.ascontiguousarray(pts[perm])
    w = w[perm]

    if pts.shape[0] > 1:
        gid, reps = _greedy_groups(pts, tol)
        atoms = pts[reps]
        mass = np.bincount(gid, weights=w, minlength=len(reps))
    else:
        atoms, mass = pts, w.copy()

    total = float(mass.sum())
    if total <= 0.0:
        raise ValueError("total mass must be positive")
    # skip the division when the mass is already 1 up to summation noise,
    # so identity-like operations are exactly idempotent
    if abs(total - 1.0) > 1e-13:
        mass = mass / total

    keep = mass >= WEIGHT_FLOOR
    if not keep.all():
        atoms = atoms[keep]
        mass = mass[keep]
        if atoms.shape[0] == 0:
            raise EmptyInputError("all atoms fell below the weight floor")
        kept = float(mass.sum())
        if abs(kept - 1.0) > 1e-13:
            mass = mass / kept

    atoms = np.ascontiguousarray(atoms)
    mass = np.ascontiguousarray(mass)
    atoms.setflags(write=False)
    mass.setflags(write=False)
    return atoms, mass


def match_rows(rows: np.ndarray, reps: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    """Index of the first row of ``reps`` within l-inf ``tol`` of each row, else -1.

    The first-match rule mirrors canonical coalescing, so matching points
    against a canonical measure's atoms reproduces the grouping that built
    those atoms.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    reps = np.atleast_2d(np.asarray(reps, dtype=float))
    n = rows.shape[0]
    out = np.full(n, -1, dtype=np.intp)
    if reps.shape[0] == 0:
        return out
    block = max(1, int(2_000_000 // max(1, reps.size)))
    for s in range(0, n, block):
        chunk = rows[s:s + block]
        near = np.abs(chunk[:, None, :] - reps[None, :, :]).max(axis=2) <= tol
        hit = near.any(axis=1)
        first = near.argmax(axis=1)
        out[s:s + block] = np.where(hit, first, -1)
    return out


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A probability measure with finitely many atoms on R^d.

    Parameters
    ----------
    atoms : array_like, shape (n, d) or (n,)
        Atom coordinates; a 1-D array is read as n atoms on the line.
    weights : array_like, shape (n,)
        Nonnegative masses.  They are normalized to sum to one.

    Construction always produces the canonical form described in the module
    docstring, so two measures built from permuted or duplicated input data
    compare equal.
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms, weights = canonical_support(self.atoms, self.weights)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def natoms(self) -> int:
        return self.atoms.shape[0]

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of a scalar function; ``fn`` maps an (n, d) array to (n,)."""
        vals = np.asarray(fn(self.atoms), dtype=float).ravel()
        return float(np.dot(self.weights, vals))

    def allclose(self, other: "DiscreteMeasure", tol: float = 1e-9) -> bool:
        """Atom-by-atom comparison of two canonical measures."""
        return (
            self.dim == other.dim
            and self.natoms == other.natoms
            and float(np.max(np.abs(self.atoms - other.atoms), initial=0.0)) <= tol
            and float(np.max(np.abs(self.weights - other.weights), initial=0.0)) <= tol
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.atoms, other.atoms)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"DiscreteMeasure(natoms={self.natoms}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class LiftedMeasure:
    """A probability measure on position-velocity pairs in R^d x R^d.

    Canonical form sorts atoms lexicographically by the joint vector
    (position, velocity); since positions are the leading coordinates, the
    atoms of the base measure appear in base-canonical order.
    """

    positions: np.ndarray
    velocities: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pos = _as_points(self.positions)
        vel = _as_points(self.velocities)
        if pos.shape != vel.shape:
            raise ValueError(
                f"positions {pos.shape} and velocities {vel.shape} must have the same shape"
            )
        joint = np.hstack([pos, vel])
        joint, weights = canonical_support(joint, self.weights)
        d = pos.shape[1]
        pos = np.ascontiguousarray(joint[:, :d])
        vel = np.ascontiguousarray(joint[:, d:])
        pos.setflags(write=False)
        vel.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @property
    def natoms(self) -> int:
        return self.positions.shape[0]

    def allclose(self, other: "LiftedMeasure", tol: float = 1e-9) -> bool:
        return (
            self.dim == other.dim
            and self.natoms == other.natoms
            and float(np.max(np.abs(self.positions - other.positions), initial=0.0)) <= tol
            and float(np.max(np.abs(self.velocities - other.velocities), initial=0.0)) <= tol
            and float(np.max(np.abs(self.weights - other.weights), initial=0.0)) <= tol
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, LiftedMeasure):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.velocities, other.velocities)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"LiftedMeasure(natoms={self.natoms}, dim={self.dim})"


@dataclass(frozen=True)
class Disintegration:
    """A base measure together with one velocity fiber per base atom.

    ``fibers[i]`` is the velocity distribution attached to ``base.atoms[i]``;
    each fiber is itself a probability measure (mass one).
    """

    base: DiscreteMeasure
    fibers: tuple[DiscreteMeasure, ...]

    def __post_init__(self):
        if len(self.fibers) != self.base.natoms:
            raise ValueError(
                f"{self.base.natoms} base atoms but {len(self.fibers)} fibers"
            )


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def make_measure(points, weights) -> DiscreteMeasure:
    """Build a canonical DiscreteMeasure from raw atoms and weights."""
    return DiscreteMeasure(points, weights)


def make_lifted(positions, velocities, weights) -> LiftedMeasure:
    """Build a canonical LiftedMeasure from raw position-velocity atoms."""
    return LiftedMeasure(positions, velocities, weights)


def dirac(point) -> DiscreteMeasure:
    """The unit mass at a single point."""
    pt = np.atleast_1d(np.asarray(point, dtype=float))
    return DiscreteMeasure(pt[None, :], np.ones(1))


def quantile_uniform(a: float, b: float, natoms: int) -> DiscreteMeasure:
    """Quantile discretization of the uniform distribution on [a, b].

    Places ``natoms`` equal atoms at the quantile midpoints
    a + (b - a) (i + 1/2) / n, the standard grid-free stand-in for a
    uniform density in 1-D computations.
    """
    if natoms < 1:
        raise ValueError("natoms must be >= 1")
    if not b > a:
        raise ValueError("need b > a")
    i = np.arange(natoms, dtype=float)
    pts = a + (b - a) * (i + 0.5) / natoms
    return DiscreteMeasure(pts[:, None], np.full(natoms, 1.0 / natoms))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def push_forward(mu: DiscreteMeasure, fn: Callable[[np.ndarray], np.ndarray]) -> DiscreteMeasure:
    """Image measure under a pointwise map.

    ``fn`` receives one atom at a time as a (d,) array and must return a
    point of a fixed target dimension (scalar output is read as R^1).
    """
    images = []
    for x in mu.atoms:
        y = np.atleast_1d(np.asarray(fn(x.copy()), dtype=float))
        if y.ndim != 1:
            raise ValueError("map must return a point (1-D array or scalar)")
        images.append(y)
    out_dim = images[0].shape[0]
    for y in images:
        if y.shape[0] != out_dim:
            raise ValueError("map returned points of inconsistent dimension")
    return DiscreteMeasure(np.vstack(images), mu.weights)


def convolve(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Convolution: atoms at all pairwise sums, weights multiplied.

    The unit mass at the origin is the identity for this operation.
    """
    if mu.dim != nu.dim:
        raise DimMismatchError(f"dim {mu.dim} vs {nu.dim}")
    atoms = (mu.atoms[:, None, :] + nu.atoms[None, :, :]).reshape(-1, mu.dim)
    weights = (mu.weights[:, None] * nu.weights[None, :]).ravel()
    return DiscreteMeasure(atoms, weights)


def scale_product(a: float, mu: DiscreteMeasure) -> DiscreteMeasure:
    """Image of ``mu`` under x -> a x."""
    return DiscreteMeasure(float(a) * mu.atoms, mu.weights)


def coalesce(mu: DiscreteMeasure, tol: float) -> DiscreteMeasure:
    """Merge atoms within l-inf distance ``tol``, greedily in lexicographic order.

    The representative of each group is its lexicographically first atom.
    Idempotent at fixed ``tol``: surviving representatives are pairwise
    farther apart than ``tol``.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    atoms, weights = canonical_support(mu.atoms, mu.weights, tol=max(tol, MERGE_TOL))
    return DiscreteMeasure(atoms, weights)


def base_of(lifted: LiftedMeasure) -> DiscreteMeasure:
    """Projection of a lifted measure onto its position factor."""
    return DiscreteMeasure(lifted.positions, lifted.weights)


def disintegrate(lifted: LiftedMeasure) -> Disintegration:
    """Split a lifted measure into its base and per-position velocity fibers.

    Positions within ``MERGE_TOL`` of each other are identified with their
    group representative, matching how the base projection coalesces them.
    """
    pos = lifted.positions
    gid, reps = _greedy_groups(pos, MERGE_TOL)
    masses = np.bincount(gid, weights=lifted.weights, minlength=len(reps))
    base = DiscreteMeasure(pos[reps], masses)
    if base.natoms != len(reps):  # pragma: no cover - representatives are tol-separated
        raise RuntimeError("disintegration grouping lost atoms")
    fibers = []
    for g in range(len(reps)):
        sel = gid == g
        fibers.append(DiscreteMeasure(lifted.velocities[sel], lifted.weights[sel]))
    return Disintegration(base, tuple(fibers))


def recombine(dis: Disintegration) -> LiftedMeasure:
    """Rebuild the lifted measure from a base and its fibers."""
    pos_parts = []
    vel_parts = []
    w_parts = []
    for x, wb, fiber in zip(dis.base.atoms, dis.base.weights, dis.fibers):
        pos_parts.append(np.broadcast_to(x, (fiber.natoms, dis.base.dim)))
        vel_parts.append(fiber.atoms)
        w_parts.append(wb * fiber.weights)
    return LiftedMeasure(
        np.vstack(pos_parts), np.vstack(vel_parts), np.concatenate(w_parts)
    )


def support_radius(mu: DiscreteMeasure) -> float:
    """Largest Euclidean norm among the atoms."""
    return float(np.max(np.linalg.norm(mu.atoms, axis=1)))
