"""Velocity-fiber rules: maps from a measure to a lifted measure over it.

A rule V assigns to every measure mu a distribution V[mu] on
position-velocity pairs whose base is exactly mu; equivalently, it attaches
a velocity fiber to each atom.  Three concrete rules are shipped:

* ``GraphPvf``: a deterministic field, fiber delta_{v(x)} at every atom.
* ``ConstantFiberPvf``: the same velocity distribution omega at every atom.
* ``SplittingParticlePvf`` (1-D): mass strictly left of the weighted median
  moves with speed -1, mass strictly right with speed +1, and the median
  atom splits so that exactly half of the total mass travels each way.

``CustomPvf`` wraps any callable with the same contract for in-process
extensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ConfigError, DimMismatchError, EmptyInputError
from .measures import (
    DiscreteMeasure,
    LiftedMeasure,
    disintegrate,
    make_measure,
)

# CDF comparisons use this absolute tolerance so dyadic near-ties (a cumsum
# landing a few ulps above 1/2) bin the way exact arithmetic would.
CDF_TOL = 1e-12


@dataclass(frozen=True)
class GraphPvf:
    """Fiber delta_{velocity(x)} at every atom: a plain velocity field."""

    velocity: Callable[[np.ndarray], np.ndarray]
    name: str = "graph"


@dataclass(frozen=True)
class ConstantFiberPvf:
    """The same velocity distribution at every atom."""

    omega: DiscreteMeasure
    name: str = "constant-fiber"


@dataclass(frozen=True)
class SplittingParticlePvf:
    """Median-splitting rule on the line; see the module docstring."""

    name: str = "splitting"


@dataclass(frozen=True)
class CustomPvf:
    """An arbitrary rule; ``evaluate`` must preserve the base measure."""

    evaluate: Callable[[DiscreteMeasure], LiftedMeasure]
    name: str = "custom"


PvfSpec = Union[GraphPvf, ConstantFiberPvf, SplittingParticlePvf, CustomPvf]


@dataclass(frozen=True)
class MedianData:
    """Weighted-median bookkeeping for a 1-D measure.

    ``B`` is the smallest atom whose CDF strictly exceeds 1/2 (up to
    CDF_TOL), ``eta = F(B) - 1/2`` the overshoot, ``mass_at_B`` the weight
    sitting on B, and ``cdf_left_of_B = F(B) - mass_at_B`` the mass strictly
    left of B.  These satisfy mass_at_B = eta + 1/2 - cdf_left_of_B.
    """

    B: float
    eta: float
    mass_at_B: float
    cdf_left_of_B: float


def median_data(mu: DiscreteMeasure) -> MedianData:
    """Locate the weighted median atom of a measure on the line."""
    if mu.dim != 1:
        raise DimMismatchError("median_data needs a 1-D measure")
    cdf = np.cumsum(mu.weights)
    idx = int(np.argmax(cdf > 0.5 + CDF_TOL))
    if not cdf[idx] > 0.5 + CDF_TOL:  # pragma: no cover - total mass is one
        idx = mu.natoms - 1
    B = float(mu.atoms[idx, 0])
    eta = float(cdf[idx] - 0.5)
    mass = float(mu.weights[idx])
    if mass <= 0:  # pragma: no cover - canonical measures have positive weights
        raise EmptyInputError("median atom carries no mass")
    return MedianData(B=B, eta=eta, mass_at_B=mass, cdf_left_of_B=float(cdf[idx] - mass))


def eval_pvf(spec: PvfSpec, mu: DiscreteMeasure) -> LiftedMeasure:
    """Evaluate a velocity-fiber rule; the result's base is exactly ``mu``."""
    if isinstance(spec, GraphPvf):
        vels = []
        for x in mu.atoms:
            v = np.atleast_1d(np.asarray(spec.velocity(x.copy()), dtype=float))
            if v.shape != (mu.dim,):
                raise DimMismatchError(
                    f"field returned shape {v.shape}, expected ({mu.dim},)"
                )
            vels.append(v)
        return LiftedMeasure(mu.atoms, np.vstack(vels), mu.weights)

    if isinstance(spec, ConstantFiberPvf):
        if spec.omega.dim != mu.dim:
            raise DimMismatchError(
                f"fiber dim {spec.omega.dim} vs measure dim {mu.dim}"
            )
        n, m = mu.natoms, spec.omega.natoms
        pos = np.repeat(mu.atoms, m, axis=0)
        vel = np.tile(spec.omega.atoms, (n, 1))
        w = (mu.weights[:, None] * spec.omega.weights[None, :]).ravel()
        return LiftedMeasure(pos, vel, w)

    if isinstance(spec, SplittingParticlePvf):
        if mu.dim != 1:
            raise DimMismatchError("the splitting rule needs a 1-D measure")
        md = median_data(mu)
        pos_parts: list[np.ndarray] = []
        vel_parts: list[float] = []
        w_parts: list[float] = []
        for x, w in zip(mu.atoms[:, 0], mu.weights):
            if x < md.B:
                pos_parts.append(x)
                vel_parts.append(-1.0)
                w_parts.append(w)
            elif x > md.B:
                pos_parts.append(x)
                vel_parts.append(1.0)
                w_parts.append(w)
            else:
                # The median atom carries eta rightward mass and
                # 1/2 - cdf_left leftward mass; zero parts are dropped by
                # canonicalization.
                pos_parts.extend([x, x])
                vel_parts.extend([1.0, -1.0])
                w_parts.extend([md.eta, 0.5 - md.cdf_left_of_B])
        pos = np.asarray(pos_parts)[:, None]
        vel = np.asarray(vel_parts)[:, None]
        return LiftedMeasure(pos, vel, np.asarray(w_parts))

    if isinstance(spec, CustomPvf):
        out = spec.evaluate(mu)
        if not isinstance(out, LiftedMeasure):
            raise ValueError("custom rule must return a LiftedMeasure")
        base = DiscreteMeasure(out.positions, out.weights)
        if not (
            base.natoms == mu.natoms
            and np.array_equal(base.atoms, mu.atoms)
            and np.max(np.abs(base.weights - mu.weights)) <= 1e-9
        ):
            raise ValueError("custom rule must preserve the base measure")
        return out

    raise TypeError(f"not a velocity-fiber rule: {spec!r}")


def barycentric_field(spec: PvfSpec, mu: DiscreteMeasure) -> np.ndarray:
    """Mean fiber velocity at each atom, as an (n, d) array aligned with
    ``mu.atoms``.

    Averaging a one-atom fiber returns its atom unchanged, so deterministic
    fields come back exactly.
    """
    dis = disintegrate(eval_pvf(spec, mu))
    if not np.array_equal(dis.base.atoms, mu.atoms):  # pragma: no cover
        raise RuntimeError("fiber rule did not preserve the base support")
    rows = []
    for fiber in dis.fibers:
        if fiber.natoms == 1:
            rows.append(fiber.atoms[0])
        else:
            rows.append(fiber.weights @ fiber.atoms)
    return np.vstack(rows)


def sublinearity_bound(spec: PvfSpec, samples: Sequence[DiscreteMeasure]) -> float:
    """Smallest C with max |v| <= C (1 + max |x|) over the sampled measures.

    A diagnostic growth constant: evaluates the rule on each sample and
    returns the largest ratio of peak fiber speed to 1 + support radius.
    """
    samples = list(samples)
    if not samples:
        raise EmptyInputError("need at least one sample measure")
    best = 0.0
    for mu in samples:
        lifted = eval_pvf(spec, mu)
        vmax = float(np.max(np.linalg.norm(lifted.velocities, axis=1)))
        xmax = float(np.max(np.linalg.norm(mu.atoms, axis=1)))
        best = max(best, vmax / (1.0 + xmax))
    return best


# ---------------------------------------------------------------------------
# JSON fragments
# ---------------------------------------------------------------------------

def _field_zero(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(x)


def _field_linear(x: np.ndarray) -> np.ndarray:
    return x


def _field_peano(x: np.ndarray) -> np.ndarray:
    return 2.0 * np.sqrt(np.abs(x))


#: Named closed-form fields available to scenario files.  "sqrt2" is an
#: alias of "peano" (the 2 sqrt(|x|) field behind the non-unique ODE runs).
GRAPH_FIELDS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "zero": _field_zero,
    "linear": _field_linear,
    "peano": _field_peano,
    "sqrt2": _field_peano,
}


def _measure_from_fragment(obj: dict, where: str) -> DiscreteMeasure:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    if "kind" in obj:
        from .scenarios import initial_from_spec  # late import, small cycle

        return initial_from_spec(obj, where)
    try:
        return make_measure(obj["atoms"], obj["weights"])
    except KeyError as exc:
        raise ConfigError(f"{where}: missing field {exc.args[0]!r}") from exc
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def pvf_from_json(obj: dict) -> PvfSpec:
    """Build a rule from its JSON fragment.

    Accepted fragments::

        {"kind": "graph", "field": "zero" | "linear" | "peano" | "sqrt2"}
        {"kind": "constant_fiber", "omega": {"atoms": [...], "weights": [...]}}
        {"kind": "constant_fiber", "omega": {"kind": "uniform_1d", ...}}
        {"kind": "splitting"}
    """
    if not isinstance(obj, dict):
        raise ConfigError("pvf: expected an object")
    kind = obj.get("kind")
    if kind == "graph":
        name = obj.get("field")
        if name not in GRAPH_FIELDS:
            known = ", ".join(sorted(GRAPH_FIELDS))
            raise ConfigError(f"pvf.field: unknown field {name!r} (known: {known})")
        return GraphPvf(velocity=GRAPH_FIELDS[name], name=f"graph:{name}")
    if kind == "constant_fiber":
        if "omega" not in obj:
            raise ConfigError("pvf.omega: required for constant_fiber")
        omega = _measure_from_fragment(obj["omega"], "pvf.omega")
        return ConstantFiberPvf(omega=omega)
    if kind == "splitting":
        return SplittingParticlePvf()
    raise ConfigError(f"pvf.kind: unknown kind {kind!r}")


def pvf_to_json(spec: PvfSpec) -> dict:
    """Inverse of ``pvf_from_json`` for the shippable rules."""
    if isinstance(spec, GraphPvf):
        field_name = spec.name.split(":", 1)[-1]
        if field_name not in GRAPH_FIELDS:
            raise ConfigError("only registry graph fields round-trip to JSON")
        return {"kind": "graph", "field": field_name}
    if isinstance(spec, ConstantFiberPvf):
        return {
            "kind": "constant_fiber",
            "omega": {
                "atoms": spec.omega.atoms.tolist(),
                "weights": spec.omega.weights.tolist(),
            },
        }
    if isinstance(spec, SplittingParticlePvf):
        return {"kind": "splitting"}
    raise ConfigError(f"cannot serialize rule {spec!r}")
