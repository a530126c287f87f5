"""Optimal-transport distances between atomic measures.

Provides the order-1 Wasserstein distance on R^d, its analogue on
position-velocity space with ground cost |x - y| + |v - w|, and a
two-stage fiber comparison that measures how far apart the velocity
fibers of two lifted measures are once their positions are coupled
optimally.  The two-stage quantity is a pseudo-metric only: it can
vanish for distinct lifted measures.

All couplings are computed by a dense two-phase primal simplex with
Bland's anti-cycling rule (no external solver).  On the line the
Wasserstein distance is instead integrated exactly from the CDF
difference, which doubles as an independent cross-check of the LP in
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import (
    DimMismatchError,
    InfeasibleError,
    IterationCapError,
    LpFailureError,
)
from .measures import DiscreteMeasure, LiftedMeasure

_PIVOT_TOL = 1e-11
_MARGINAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TransportPlan:
    """A coupling between two atom lists, stored as a dense mass matrix.

    ``mass[i, j]`` is the mass moved from atom i of the first measure to
    atom j of the second; row and column sums reproduce the marginals.
    """

    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        if m.ndim != 2:
            raise ValueError("plan mass must be a 2-D matrix")
        if np.any(m < -1e-12):
            raise ValueError("plan mass must be nonnegative")
        m = np.clip(m, 0.0, None)
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mass.shape

    @property
    def row_marginals(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @property
    def col_marginals(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def nonzeros(self, tol: float = 0.0) -> Iterator[tuple[int, int, float]]:
        """Yield (i, j, mass) for entries with mass > ``tol``, row-major."""
        rows, cols = np.nonzero(self.mass > tol)
        for i, j in zip(rows, cols):
            yield int(i), int(j), float(self.mass[i, j])


# ---------------------------------------------------------------------------
# dense two-phase simplex
# ---------------------------------------------------------------------------

def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row, :] /= tableau[row, col]
    piv = tableau[row, :]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i, :] -= tableau[i, col] * piv
    basis[row] = col


def _simplex_iterate(tableau: np.ndarray, basis: np.ndarray, n_enter: int, cap: int) -> None:
    """Run Bland-rule pivots until the reduced costs are nonnegative.

    Only columns < ``n_enter`` may enter the basis.  Raises IterationCapError
    when more than ``cap`` pivots are needed and LpFailureError on an
    unbounded ray (impossible for transportation polytopes, kept defensive).
    """
    ncon = tableau.shape[0] - 1
    obj = tableau[ncon]
    for _ in range(cap):
        enter = -1
        for j in range(n_enter):
            if obj[j] < -_PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return
        leave = -1
        best = np.inf
        for i in range(ncon):
            a = tableau[i, enter]
            if a > _PIVOT_TOL:
                ratio = tableau[i, -1] / a
                if ratio < best - _PIVOT_TOL or (
                    abs(ratio - best) <= _PIVOT_TOL
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            raise LpFailureError("linear program is unbounded")
        _pivot(tableau, basis, leave, enter)
    raise IterationCapError(f"simplex exceeded {cap} iterations")


def _solve_equality_lp(A: np.ndarray, b: np.ndarray, cost: np.ndarray, cap: int) -> np.ndarray:
    """min cost.x subject to A x = b, x >= 0, with b >= 0.  Returns x."""
    ncon, nvar = A.shape
    tableau = np.zeros((ncon + 1, nvar + ncon + 1))
    tableau[:ncon, :nvar] = A
    tableau[:ncon, nvar:nvar + ncon] = np.eye(ncon)
    tableau[:ncon, -1] = b
    basis = np.arange(nvar, nvar + ncon, dtype=np.intp)

    # Phase 1: minimize the artificial mass.
    tableau[ncon, :nvar] = -A.sum(axis=0)
    tableau[ncon, -1] = -b.sum()
    _simplex_iterate(tableau, basis, n_enter=nvar, cap=cap)
    if -tableau[ncon, -1] > 1e-9:
        raise InfeasibleError("constraints admit no transport plan")

    # Pivot leftover artificials out of the basis; all-zero rows are
    # redundant constraints and stay inert.
    for i in range(ncon):
        if basis[i] >= nvar:
            for j in range(nvar):
                if abs(tableau[i, j]) > _PIVOT_TOL:
                    _pivot(tableau, basis, i, j)
                    break

    # Phase 2: the real objective.
    tableau[ncon, :] = 0.0
    tableau[ncon, :nvar] = cost
    for i in range(ncon):
        if basis[i] < nvar and tableau[ncon, basis[i]] != 0.0:
            tableau[ncon, :] -= tableau[ncon, basis[i]] * tableau[i, :]
    _simplex_iterate(tableau, basis, n_enter=nvar, cap=cap)

    x = np.zeros(nvar)
    for i in range(ncon):
        if basis[i] < nvar:
            x[basis[i]] = tableau[i, -1]
    return np.clip(x, 0.0, None)


def lp_solve(
    costs,
    row_marginals,
    col_marginals,
    extra_cost: Optional[tuple[np.ndarray, float]] = None,
    max_iter: Optional[int] = None,
) -> tuple[TransportPlan, float]:
    """Minimize ``sum(costs * plan)`` over plans with the given marginals.

    ``extra_cost``, when given, is a pair (matrix, bound) imposing the side
    constraint ``sum(matrix * plan) <= bound``; it is how the two-stage
    fiber comparison restricts stage two to (nearly) position-optimal plans.

    Both marginals must be probability vectors (sums within 1e-9 of one).
    Raises InfeasibleError when no plan satisfies the constraints and
    IterationCapError past ``max_iter`` pivots per phase (default 10 m n).
    """
    C = np.asarray(costs, dtype=float)
    if C.ndim != 2:
        raise ValueError("costs must be a 2-D matrix")
    if not np.all(np.isfinite(C)):
        raise ValueError("costs must be finite")
    r = np.asarray(row_marginals, dtype=float).ravel()
    c = np.asarray(col_marginals, dtype=float).ravel()
    m, n = C.shape
    if r.shape[0] != m or c.shape[0] != n:
        raise ValueError("marginal lengths must match the cost matrix shape")
    if np.any(r < 0) or np.any(c < 0):
        raise ValueError("marginals must be nonnegative")
    if abs(r.sum() - 1.0) > _MARGINAL_TOL or abs(c.sum() - 1.0) > _MARGINAL_TOL:
        raise ValueError("marginals must each sum to one")

    nv = m * n
    ncon = m + n
    extra = extra_cost is not None
    A = np.zeros((ncon + (1 if extra else 0), nv + (1 if extra else 0)))
    for i in range(m):
        A[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A[m + j, j:nv:n] = 1.0
    b = np.concatenate([r, c])
    cost_vec = C.ravel().copy()
    if extra:
        E, bound = extra_cost
        E = np.asarray(E, dtype=float)
        if E.shape != C.shape:
            raise ValueError("extra cost matrix must match the cost shape")
        bound = float(bound)
        if bound < 0:
            raise ValueError("extra cost bound must be >= 0")
        A[ncon, :nv] = E.ravel()
        A[ncon, nv] = 1.0  # slack for the inequality
        b = np.concatenate([b, [bound]])
        cost_vec = np.concatenate([cost_vec, [0.0]])

    cap = int(max_iter) if max_iter is not None else 10 * m * n
    x = _solve_equality_lp(A, b, cost_vec, cap)
    plan = TransportPlan(x[:nv].reshape(m, n))
    if (
        np.max(np.abs(plan.row_marginals - r)) > _MARGINAL_TOL
        or np.max(np.abs(plan.col_marginals - c)) > _MARGINAL_TOL
    ):  # pragma: no cover - simplex keeps equality rows satisfied
        raise LpFailureError("solver returned a plan violating the marginals")
    value = float(np.sum(C * plan.mass))
    return plan, value


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def _pairwise_dist(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - Y[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def _w1_quantile(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Exact 1-D Wasserstein-1 as the integral of |F_mu - F_nu|."""
    a = mu.atoms[:, 0]
    b = nu.atoms[:, 0]
    grid = np.sort(np.concatenate([a, b]))
    cwa = np.concatenate([[0.0], np.cumsum(mu.weights)])
    cwb = np.concatenate([[0.0], np.cumsum(nu.weights)])
    fa = cwa[np.searchsorted(a, grid, side="right")]
    fb = cwb[np.searchsorted(b, grid, side="right")]
    return float(np.sum(np.abs(fa - fb)[:-1] * np.diff(grid)))


def w1_distance(mu: DiscreteMeasure, nu: DiscreteMeasure, method: str = "auto") -> float:
    """Wasserstein-1 distance with Euclidean ground cost.

    ``method`` is "auto" (quantile integration on the line, LP otherwise),
    "quantile" (1-D only) or "lp".  Both routes are exact for atomic
    measures up to float roundoff, which the test suite exploits by
    comparing them against each other.
    """
    if mu.dim != nu.dim:
        raise DimMismatchError(f"dim {mu.dim} vs {nu.dim}")
    if method == "auto":
        method = "quantile" if mu.dim == 1 else "lp"
    if method == "quantile":
        if mu.dim != 1:
            raise DimMismatchError("quantile integration needs dim 1")
        return _w1_quantile(mu, nu)
    if method == "lp":
        cost = _pairwise_dist(mu.atoms, nu.atoms)
        _, value = lp_solve(cost, mu.weights, nu.weights)
        return max(value, 0.0)
    raise ValueError(f"unknown method {method!r}")


def w1_plan(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[TransportPlan, float]:
    """An optimal coupling for the Euclidean Wasserstein-1 problem."""
    if mu.dim != nu.dim:
        raise DimMismatchError(f"dim {mu.dim} vs {nu.dim}")
    cost = _pairwise_dist(mu.atoms, nu.atoms)
    return lp_solve(cost, mu.weights, nu.weights)


def lifted_w1(v1: LiftedMeasure, v2: LiftedMeasure) -> float:
    """Wasserstein-1 distance on position-velocity space.

    Uses the additive ground cost |x - y| + |v - w| (Euclidean norm on each
    factor), so moving mass in position and in velocity are charged
    independently.
    """
    if v1.dim != v2.dim:
        raise DimMismatchError(f"dim {v1.dim} vs {v2.dim}")
    cost = _pairwise_dist(v1.positions, v2.positions) + _pairwise_dist(
        v1.velocities, v2.velocities
    )
    _, value = lp_solve(cost, v1.weights, v2.weights)
    return max(value, 0.0)


def fiber_pseudometric(v1: LiftedMeasure, v2: LiftedMeasure) -> float:
    """Velocity discrepancy over (nearly) position-optimal couplings.

    Stage one couples the lifted atoms to minimize the position cost
    |x - y| alone; its optimum equals the Wasserstein-1 distance of the
    base measures.  Stage two minimizes the velocity cost |v - w| among
    couplings whose position cost stays within a relative slack
    1e-9 (1 + W*) of that optimum.

    This is a pseudo-metric: it vanishes whenever the fibers can be
    matched along some position-optimal coupling, even if the lifted
    measures differ.
    """
    if v1.dim != v2.dim:
        raise DimMismatchError(f"dim {v1.dim} vs {v2.dim}")
    pos_cost = _pairwise_dist(v1.positions, v2.positions)
    _, wstar = lp_solve(pos_cost, v1.weights, v2.weights)
    slack = 1e-9 * (1.0 + wstar)
    vel_cost = _pairwise_dist(v1.velocities, v2.velocities)
    _, value = lp_solve(
        vel_cost, v1.weights, v2.weights, extra_cost=(pos_cost, wstar + slack)
    )
    return max(value, 0.0)
