"""Named experiment configurations and the artifact-producing runner.

A scenario is plain JSON data (schema "mde-lab/1"): a velocity-rule
fragment, an initial-measure fragment, horizon T, one or more grid sizes,
scheme tags, and analysis flags.  ``run_scenario`` executes every
(scheme, N) combination, writes CSV paths plus any requested reports into
the output directory, and finishes with a manifest that echoes the full
normalized configuration, so re-running from the manifest reproduces the
artifacts byte for byte.

Five built-ins cover the desk-scale experiments: "splitting-dirac",
"splitting-uniform", "binomial", "uniform-fiber", "peano".
"""

from __future__ import annotations

import copy
import os
import time
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError, IoError
from .measures import (
    MERGE_TOL,
    DiscreteMeasure,
    dirac,
    make_measure,
    quantile_uniform,
    support_radius,
)
from .pvf import PvfSpec, pvf_from_json
from .schemes import SCHEMES, GridSpec, MeasurePath, SchemeConfig, run_scheme
from .superposition import build_representation
from .analysis import convergence_study, residual, scheme_compare
from . import artifacts

SCHEMA = "mde-lab/1"


def initial_from_spec(obj: dict, where: str = "initial") -> DiscreteMeasure:
    """Build a measure from a JSON fragment: dirac, atoms, or uniform_1d."""
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = obj.get("kind")
    if kind == "dirac":
        if "point" not in obj:
            raise ConfigError(f"{where}.point: required for dirac")
        try:
            return dirac(obj["point"])
        except Exception as exc:
            raise ConfigError(f"{where}.point: {exc}") from exc
    if kind == "atoms":
        for key in ("atoms", "weights"):
            if key not in obj:
                raise ConfigError(f"{where}.{key}: required for atoms")
        try:
            return make_measure(obj["atoms"], obj["weights"])
        except Exception as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    if kind == "uniform_1d":
        for key in ("a", "b"):
            if key not in obj:
                raise ConfigError(f"{where}.{key}: required for uniform_1d")
        natoms = obj.get("atoms", 64)
        try:
            return quantile_uniform(float(obj["a"]), float(obj["b"]), int(natoms))
        except Exception as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(
        f"{where}.kind: unknown kind {kind!r} (known: atoms, dirac, uniform_1d)"
    )


@dataclass(frozen=True)
class Scenario:
    """A complete experiment configuration, held as plain data."""

    name: str
    pvf: dict
    initial: dict
    T: float
    Ns: tuple[int, ...]
    schemes: tuple[str, ...]
    dvs: Optional[tuple[float, ...]] = None
    residual: bool = False
    converge: bool = False
    compare: bool = False
    represent: bool = False
    coalesce_tol: float = MERGE_TOL
    prune_floor: float = 0.0
    outputs: str = "out"
    description: str = ""

    def __post_init__(self):
        if not self.name:
            raise ConfigError("name: must be nonempty")
        if not self.T > 0:
            raise ConfigError("T: must be positive")
        if len(self.Ns) == 0:
            raise ConfigError("N: need at least one grid size")
        if any(int(n) != n or n < 1 for n in self.Ns):
            raise ConfigError("N: grid sizes must be integers >= 1")
        if len(self.schemes) == 0:
            raise ConfigError("scheme: need at least one scheme")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            raise ConfigError(
                f"scheme: unknown {unknown[0]!r} (known: {', '.join(SCHEMES)}, all)"
            )
        if self.dvs is not None and len(self.dvs) != len(self.Ns):
            raise ConfigError("dv: need one velocity step per N")
        object.__setattr__(self, "pvf", copy.deepcopy(self.pvf))
        object.__setattr__(self, "initial", copy.deepcopy(self.initial))
        object.__setattr__(self, "Ns", tuple(int(n) for n in self.Ns))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.dvs is not None:
            object.__setattr__(self, "dvs", tuple(float(v) for v in self.dvs))

    def pvf_spec(self) -> PvfSpec:
        return pvf_from_json(self.pvf)

    def initial_measure(self) -> DiscreteMeasure:
        return initial_from_spec(self.initial, "initial")

    def grid(self, i: int) -> GridSpec:
        dv = None if self.dvs is None else self.dvs[i]
        return GridSpec(T=self.T, N=self.Ns[i], dv=dv)


def scenario_to_json(scn: Scenario) -> dict:
    obj = {
        "schema": SCHEMA,
        "name": scn.name,
        "description": scn.description,
        "pvf": copy.deepcopy(scn.pvf),
        "initial": copy.deepcopy(scn.initial),
        "T": scn.T,
        "N": list(scn.Ns),
        "scheme": list(scn.schemes),
        "residual": scn.residual,
        "converge": scn.converge,
        "compare": scn.compare,
        "represent": scn.represent,
        "coalesce_tol": scn.coalesce_tol,
        "prune_floor": scn.prune_floor,
        "outputs": scn.outputs,
    }
    if scn.dvs is not None:
        obj["dv"] = list(scn.dvs)
    return obj


def scenario_from_json(obj: dict) -> Scenario:
    if not isinstance(obj, dict):
        raise ConfigError("scenario: expected a JSON object")
    schema = obj.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"schema: expected {SCHEMA!r}, got {schema!r}")
    for key in ("pvf", "initial", "T", "N"):
        if key not in obj:
            raise ConfigError(f"{key}: required")
    raw_n = obj["N"]
    Ns = tuple(raw_n) if isinstance(raw_n, (list, tuple)) else (raw_n,)
    try:
        Ns = tuple(int(n) for n in Ns)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"N: {exc}") from exc
    raw_scheme = obj.get("scheme", "all")
    if raw_scheme == "all":
        schemes = tuple(SCHEMES)
    elif isinstance(raw_scheme, str):
        schemes = (raw_scheme,)
    elif isinstance(raw_scheme, (list, tuple)):
        schemes = tuple(raw_scheme)
    else:
        raise ConfigError("scheme: expected a tag, a list of tags, or 'all'")
    raw_dv = obj.get("dv")
    if raw_dv is None:
        dvs = None
    elif isinstance(raw_dv, (list, tuple)):
        dvs = tuple(float(v) for v in raw_dv)
    else:
        dvs = tuple(float(raw_dv) for _ in Ns)
    try:
        T = float(obj["T"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"T: {exc}") from exc
    flags = {}
    for key in ("residual", "converge", "compare", "represent"):
        val = obj.get(key, False)
        if not isinstance(val, bool):
            raise ConfigError(f"{key}: expected true or false")
        flags[key] = val
    return Scenario(
        name=str(obj.get("name", "custom")),
        pvf=obj["pvf"],
        initial=obj["initial"],
        T=T,
        Ns=Ns,
        schemes=schemes,
        dvs=dvs,
        coalesce_tol=float(obj.get("coalesce_tol", MERGE_TOL)),
        prune_floor=float(obj.get("prune_floor", 0.0)),
        outputs=str(obj.get("outputs", "out")),
        description=str(obj.get("description", "")),
        **flags,
    )


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _builtin_scenarios() -> dict[str, Scenario]:
    scns = [
        Scenario(
            name="splitting-dirac",
            description="splitting rule from a point mass; the two halves "
            "drift apart while the mean-velocity run stays put",
            pvf={"kind": "splitting"},
            initial={"kind": "dirac", "point": [0.0]},
            T=1.0,
            Ns=(4, 16, 64),
            schemes=tuple(SCHEMES),
            compare=True,
            represent=False,
            outputs=os.path.join("out", "splitting-dirac"),
        ),
        Scenario(
            name="splitting-uniform",
            description="splitting rule from a uniform block on [0,1]; the "
            "block tears into two translating halves",
            pvf={"kind": "splitting"},
            initial={"kind": "uniform_1d", "a": 0.0, "b": 1.0, "atoms": 256},
            T=1.0,
            Ns=(64,),
            schemes=("lagrangian",),
            residual=True,
            outputs=os.path.join("out", "splitting-uniform"),
        ),
        Scenario(
            name="binomial",
            description="every atom moves left or right with equal chance; "
            "node laws are binomial and concentrate at the origin",
            pvf={
                "kind": "constant_fiber",
                "omega": {
                    "kind": "atoms",
                    "atoms": [[-1.0], [1.0]],
                    "weights": [0.5, 0.5],
                },
            },
            initial={"kind": "dirac", "point": [0.0]},
            T=1.0,
            Ns=(2, 4, 8),
            schemes=tuple(SCHEMES),
            compare=True,
            converge=True,
            represent=True,
            outputs=os.path.join("out", "binomial"),
        ),
        Scenario(
            name="uniform-fiber",
            description="constant uniform velocity fiber on [-1,1] "
            "(64-point quantile discretization); mass spreads into a "
            "widening lattice",
            pvf={
                "kind": "constant_fiber",
                "omega": {"kind": "uniform_1d", "a": -1.0, "b": 1.0, "atoms": 64},
            },
            initial={"kind": "dirac", "point": [0.0]},
            T=1.0,
            Ns=(1, 2),
            schemes=tuple(SCHEMES),
            compare=True,
            outputs=os.path.join("out", "uniform-fiber"),
        ),
        Scenario(
            name="peano",
            description="graph rule v = 2 sqrt(|x|) from -1: after hitting "
            "the origin the grid scheme selects one branch of the "
            "non-unique flow",
            pvf={"kind": "graph", "field": "peano"},
            initial={"kind": "dirac", "point": [-1.0]},
            T=3.0,
            Ns=(3, 6, 9),
            dvs=(1.0, 0.5, 1.0 / 3.0),
            schemes=("las",),
            represent=True,
            outputs=os.path.join("out", "peano"),
        ),
    ]
    return {s.name: s for s in scns}


_BUILTINS = _builtin_scenarios()
_REGISTRY: dict[str, Scenario] = {}


def register_scenario(scn: Scenario) -> None:
    """Add a user scenario to the registry; names must be fresh."""
    if scn.name in _BUILTINS or scn.name in _REGISTRY:
        raise ConfigError(f"name: {scn.name!r} conflicts with an existing scenario")
    _REGISTRY[scn.name] = scn


def list_scenarios() -> list[tuple[str, str]]:
    """(name, description) pairs: built-ins first, then registered ones."""
    rows = [(s.name, s.description) for s in _BUILTINS.values()]
    rows.extend(
        (s.name, s.description) for _, s in sorted(_REGISTRY.items())
    )
    return rows


def get_scenario(name: str) -> Scenario:
    if name in _BUILTINS:
        return _BUILTINS[name]
    if name in _REGISTRY:
        return _REGISTRY[name]
    known = ", ".join(n for n, _ in list_scenarios())
    raise ConfigError(f"unknown scenario {name!r} (known: {known})")


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def _safe_tag(scheme: str) -> str:
    return scheme.replace("/", "-")


def run_scenario(scn: Scenario) -> dict:
    """Execute all (scheme, N) runs and write artifacts; returns the manifest."""
    started = time.perf_counter()
    spec = scn.pvf_spec()
    mu0 = scn.initial_measure()
    out = scn.outputs
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out!r}: {exc}") from exc

    written: list[str] = []
    pruned: dict[str, float] = {}
    radii: dict[str, float] = {}
    notes: list[str] = []

    def emit(name: str, writer, payload) -> None:
        writer(payload, os.path.join(out, name))
        written.append(name)

    paths: dict[tuple[str, int], MeasurePath] = {}
    for i, n in enumerate(scn.Ns):
        grid = scn.grid(i)
        for scheme in scn.schemes:
            cfg = SchemeConfig(
                scheme=scheme,
                grid=grid,
                coalesce_tol=scn.coalesce_tol,
                prune_floor=scn.prune_floor,
            )
            path = run_scheme(spec, mu0, cfg)
            paths[(scheme, n)] = path
            tag = f"{_safe_tag(scheme)}_N{n}"
            emit(f"path_{tag}.csv", artifacts.write_path_csv, path)
            pruned[tag] = path.pruned_mass
            radii[tag] = max(support_radius(mu) for mu in path.measures)
            if scn.represent:
                ens = build_representation(path)
                emit(
                    f"trajectories_{tag}.json",
                    artifacts.write_trajectories_json,
                    ens,
                )
            if scn.residual:
                rep = residual(path, spec)
                emit(f"residual_{tag}.csv", artifacts.write_residual_csv, rep)
                emit(
                    f"residual_{tag}.json",
                    lambda obj, p: artifacts.write_json(obj, p),
                    artifacts.residual_to_json(rep),
                )

    if scn.compare:
        for n in scn.Ns:
            table = scheme_compare(spec, mu0, n, scn.T)
            emit(f"comparison_N{n}.csv", artifacts.write_comparison_csv, table)
            emit(
                f"comparison_N{n}.json",
                lambda obj, p: artifacts.write_json(obj, p),
                artifacts.comparison_to_json(table),
            )

    if scn.converge:
        if len(scn.Ns) < 2:
            notes.append("converge requested but only one N given; skipped")
        elif scn.dvs is not None:
            notes.append("converge uses standard grids; dv overrides ignored")
        if len(scn.Ns) >= 2:
            for scheme in scn.schemes:
                table = convergence_study(spec, mu0, scheme, scn.Ns, scn.T)
                stag = _safe_tag(scheme)
                emit(
                    f"convergence_{stag}.csv",
                    artifacts.write_convergence_csv,
                    table,
                )
                emit(
                    f"convergence_{stag}.json",
                    lambda obj, p: artifacts.write_json(obj, p),
                    artifacts.convergence_to_json(table),
                )

    manifest = {
        "schema": SCHEMA,
        "kind": "manifest",
        "scenario": scenario_to_json(scn),
        "artifacts": sorted(written),
        "pruned_mass": pruned,
        "support_radius": radii,
        "notes": notes,
        "wall_time_s": time.perf_counter() - started,
    }
    artifacts.write_json(manifest, os.path.join(out, "manifest.json"))
    return manifest
