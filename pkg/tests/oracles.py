"""Independent reference computations for the test suite.

Nothing in this module calls into mdelab.  Expected values come from
exact rational arithmetic (fractions + math.comb), closed forms, scipy's
HiGHS linear-programming solver, and brute-force vertex enumeration, so
agreement with the package is meaningful.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import scipy.optimize


# ---------------------------------------------------------------------------
# closed forms for the worked examples
# ---------------------------------------------------------------------------

def binomial_law(k: int, N: int) -> list[tuple[float, float]]:
    """Law of the k-step +-1 random walk scaled by 1/N.

    Returns (coordinate, weight) pairs on the lattice (2 i - k) / N with
    exact dyadic weights C(k, i) / 2^k, sorted by coordinate.
    """
    return [
        ((2 * i - k) / N, float(Fraction(math.comb(k, i), 2**k)))
        for i in range(k + 1)
    ]


def binomial_mad(N: int) -> float:
    """E|S_N| / N for the N-step +-1 walk, exact rational then float."""
    tot = sum(
        Fraction(math.comb(N, i), 2**N) * abs(2 * i - N) for i in range(N + 1)
    )
    return float(Fraction(tot, N))


def splitting_dirac_atoms(x0: float, t: float) -> tuple[list[float], list[float]]:
    """Closed-form solution of the splitting rule from a point mass."""
    if t == 0:
        return [x0], [1.0]
    return [x0 - t, x0 + t], [0.5, 0.5]


def splitting_uniform_atoms(t: float, M: int) -> tuple[list[float], list[float]]:
    """Quantile discretization of the torn uniform block on [0, 1].

    The left half of the initial block translates by -t and the right half
    by +t, so the M quantile atoms (i + 1/2)/M split evenly.
    """
    atoms = []
    for i in range(M):
        x = (i + 0.5) / M
        atoms.append(x - t if i < M // 2 else x + t)
    return atoms, [1.0 / M] * M


def peano_step_positions(x0: float, steps: int, dt: float, dv: float) -> list[float]:
    """Forward iteration of the 2 sqrt|x| field with floor velocity binning."""
    xs = [x0]
    for _ in range(steps):
        v = 2.0 * math.sqrt(abs(xs[-1]))
        vbin = math.floor(v / dv + 1e-9) * dv
        xs.append(xs[-1] + dt * vbin)
    return xs


# ---------------------------------------------------------------------------
# transport references
# ---------------------------------------------------------------------------

def w1_inverse_cdf(xa, wa, xb, wb) -> float:
    """1-D Wasserstein-1 via the inverse-CDF (quantile-slab) coupling.

    A different formula from the package's CDF-difference integral: pool
    the cumulative weight levels of both measures and charge each slab the
    distance between the two quantile values on it.
    """
    ia = np.argsort(np.asarray(xa, dtype=float), kind="stable")
    ib = np.argsort(np.asarray(xb, dtype=float), kind="stable")
    xa = np.asarray(xa, dtype=float)[ia]
    wa = np.asarray(wa, dtype=float)[ia]
    xb = np.asarray(xb, dtype=float)[ib]
    wb = np.asarray(wb, dtype=float)[ib]
    ca = np.cumsum(wa)
    cb = np.cumsum(wb)
    top = min(ca[-1], cb[-1])
    levels = np.unique(np.clip(np.concatenate([[0.0], ca, cb]), 0.0, top))
    total = 0.0
    for lo, hi in zip(levels[:-1], levels[1:]):
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        qa = xa[np.searchsorted(ca, mid, side="left")]
        qb = xb[np.searchsorted(cb, mid, side="left")]
        total += (hi - lo) * abs(qa - qb)
    return float(total)


def _transport_eq(m: int, n: int) -> np.ndarray:
    A = np.zeros((m + n, m * n))
    for i in range(m):
        A[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        A[m + j, j::n] = 1.0
    return A


def lp_transport_scipy(cost, a, b, extra=None) -> tuple[float, np.ndarray]:
    """Transportation LP (optionally with one extra inequality) via HiGHS."""
    cost = np.asarray(cost, dtype=float)
    m, n = cost.shape
    A_eq = _transport_eq(m, n)
    b_eq = np.concatenate([np.asarray(a, float), np.asarray(b, float)])
    kwargs = {}
    if extra is not None:
        emat, bound = extra
        kwargs["A_ub"] = np.asarray(emat, float).reshape(1, m * n)
        kwargs["b_ub"] = np.asarray([bound], float)
    res = scipy.optimize.linprog(
        cost.ravel(), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", **kwargs
    )
    if res.status != 0:
        raise RuntimeError(f"scipy linprog failed with status {res.status}")
    return float(res.fun), res.x.reshape(m, n)


def fiber_pseudometric_scipy(pos_cost, vel_cost, a, b) -> float:
    """Two-stage relaxed problem solved entirely by scipy."""
    wstar, _ = lp_transport_scipy(pos_cost, a, b)
    slack = 1e-9 * (1.0 + wstar)
    value, _ = lp_transport_scipy(vel_cost, a, b, extra=(pos_cost, wstar + slack))
    return max(value, 0.0)


def transport_vertices(a, b, tol: float = 1e-10) -> list[np.ndarray]:
    """All vertices of the transportation polytope with marginals a, b.

    Enumerates every basis (m + n - 1 columns of the reduced equality
    system) and keeps the nonnegative basic solutions.  Exponential, fine
    for the <= 3 x 3 instances it is used on.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape[0], b.shape[0]
    A = _transport_eq(m, n)[:-1]  # last constraint is redundant
    rhs = np.concatenate([a, b])[:-1]
    k = m + n - 1
    verts: list[np.ndarray] = []
    seen: set[tuple] = set()
    for cols in itertools.combinations(range(m * n), k):
        sub = A[:, cols]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x_basis = np.linalg.solve(sub, rhs)
        if np.any(x_basis < -tol):
            continue
        x = np.zeros(m * n)
        x[list(cols)] = np.clip(x_basis, 0.0, None)
        key = tuple(np.round(x, 9))
        if key in seen:
            continue
        seen.add(key)
        verts.append(x.reshape(m, n))
    return verts


def fiber_faceopt(pos_cost, vel_cost, a, b, face_tol: float = 1e-9):
    """Minimum velocity cost over the position-optimal face, by enumeration.

    Every vertex of the optimal face is a vertex of the polytope, so the
    face optimum of a linear function is attained among the enumerated
    vertices whose position cost ties the optimum.
    """
    verts = transport_vertices(a, b)
    pvals = [float(np.sum(pos_cost * v)) for v in verts]
    wstar = min(pvals)
    vopt = min(
        float(np.sum(vel_cost * v))
        for v, p in zip(verts, pvals)
        if p <= wstar + face_tol
    )
    return vopt, wstar


# ---------------------------------------------------------------------------
# seeded random instances
# ---------------------------------------------------------------------------

def random_support_1d(rng, max_atoms: int = 20, span: float = 5.0):
    n = int(rng.integers(1, max_atoms + 1))
    pts = rng.uniform(-span, span, size=n)
    w = rng.uniform(0.05, 1.0, size=n)
    return pts, w / w.sum()


def random_support(rng, dim: int, max_atoms: int = 10, span: float = 5.0):
    n = int(rng.integers(1, max_atoms + 1))
    pts = rng.uniform(-span, span, size=(n, dim))
    w = rng.uniform(0.05, 1.0, size=n)
    return pts, w / w.sum()
