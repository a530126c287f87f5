"""mdelab: a numerical laboratory for measure-valued evolution laws.

Probability measures with finitely many atoms evolve under velocity rules
that attach a distribution of velocities to every point of a measure.
The package provides the measure algebra, exact Wasserstein-1 transport
for small instances, three time-stepping schemes, trajectory-ensemble
representations of runs, weak-residual and convergence diagnostics, and a
scenario-driven CLI that reproduces the desk-scale experiments.
"""

from .errors import (
    BaseOffGridError,
    ConfigError,
    DimMismatchError,
    EmptyInputError,
    EndpointMismatchError,
    InfeasibleError,
    IoError,
    IterationCapError,
    LpFailureError,
    MdeLabError,
    NegativeWeightError,
    OutOfRangeError,
    SupportBlowupError,
)
from .measures import (
    MERGE_TOL,
    WEIGHT_FLOOR,
    DiscreteMeasure,
    Disintegration,
    LiftedMeasure,
    base_of,
    coalesce,
    convolve,
    dirac,
    disintegrate,
    make_lifted,
    make_measure,
    push_forward,
    quantile_uniform,
    recombine,
    scale_product,
    support_radius,
)
from .transport import (
    TransportPlan,
    fiber_pseudometric,
    lifted_w1,
    lp_solve,
    w1_distance,
    w1_plan,
)
from .pvf import (
    GRAPH_FIELDS,
    ConstantFiberPvf,
    CustomPvf,
    GraphPvf,
    MedianData,
    PvfSpec,
    SplittingParticlePvf,
    barycentric_field,
    eval_pvf,
    median_data,
    pvf_from_json,
    pvf_to_json,
    sublinearity_bound,
)
from .schemes import (
    LAGRANGIAN,
    LAS,
    MEAN_VELOCITY,
    SCHEMES,
    GridSpec,
    MeasurePath,
    SchemeConfig,
    interpolate_at,
    lagrangian_run,
    las_run,
    mean_velocity_run,
    run_scheme,
    snap_space,
    snap_velocity,
    support_bound_check,
)
from .superposition import (
    FiberBarycenterReport,
    SegmentEnsemble,
    TrajectoryEnsemble,
    build_representation,
    concat_merge,
    evaluate_pushforward,
    max_speed,
    segment_ensemble,
    verify_fiber_barycenter,
)
from .analysis import (
    ComparisonTable,
    ConvergenceTable,
    ResidualReport,
    TestFunction,
    convergence_study,
    default_test_family,
    residual,
    scheme_compare,
)
from .scenarios import (
    Scenario,
    get_scenario,
    initial_from_spec,
    list_scenarios,
    register_scenario,
    run_scenario,
    scenario_from_json,
    scenario_to_json,
)
from . import artifacts

__version__ = "0.1.0"

__all__ = [
    "BaseOffGridError",
    "ConfigError",
    "DimMismatchError",
    "EmptyInputError",
    "EndpointMismatchError",
    "InfeasibleError",
    "IoError",
    "IterationCapError",
    "LpFailureError",
    "MdeLabError",
    "NegativeWeightError",
    "OutOfRangeError",
    "SupportBlowupError",
    "MERGE_TOL",
    "WEIGHT_FLOOR",
    "DiscreteMeasure",
    "Disintegration",
    "LiftedMeasure",
    "base_of",
    "coalesce",
    "convolve",
    "dirac",
    "disintegrate",
    "make_lifted",
    "make_measure",
    "push_forward",
    "quantile_uniform",
    "recombine",
    "scale_product",
    "support_radius",
    "TransportPlan",
    "fiber_pseudometric",
    "lifted_w1",
    "lp_solve",
    "w1_distance",
    "w1_plan",
    "GRAPH_FIELDS",
    "ConstantFiberPvf",
    "CustomPvf",
    "GraphPvf",
    "MedianData",
    "PvfSpec",
    "SplittingParticlePvf",
    "barycentric_field",
    "eval_pvf",
    "median_data",
    "pvf_from_json",
    "pvf_to_json",
    "sublinearity_bound",
    "LAGRANGIAN",
    "LAS",
    "MEAN_VELOCITY",
    "SCHEMES",
    "GridSpec",
    "MeasurePath",
    "SchemeConfig",
    "interpolate_at",
    "lagrangian_run",
    "las_run",
    "mean_velocity_run",
    "run_scheme",
    "snap_space",
    "snap_velocity",
    "support_bound_check",
    "FiberBarycenterReport",
    "SegmentEnsemble",
    "TrajectoryEnsemble",
    "build_representation",
    "concat_merge",
    "evaluate_pushforward",
    "max_speed",
    "segment_ensemble",
    "verify_fiber_barycenter",
    "ComparisonTable",
    "ConvergenceTable",
    "ResidualReport",
    "TestFunction",
    "convergence_study",
    "default_test_family",
    "residual",
    "scheme_compare",
    "Scenario",
    "get_scenario",
    "initial_from_spec",
    "list_scenarios",
    "register_scenario",
    "run_scenario",
    "scenario_from_json",
    "scenario_to_json",
    "artifacts",
    "__version__",
]
