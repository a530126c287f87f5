import numpy as np
import pytest

import oracles
from mdelab import (
    ConstantFiberPvf,
    CustomPvf,
    GraphPvf,
    GridSpec,
    LAGRANGIAN,
    LAS,
    MEAN_VELOCITY,
    SchemeConfig,
    SplittingParticlePvf,
    TestFunction,
    convergence_study,
    default_test_family,
    dirac,
    eval_pvf,
    interpolate_at,
    lagrangian_run,
    las_run,
    make_lifted,
    make_measure,
    mean_velocity_run,
    residual,
    scheme_compare,
    w1_distance,
)
from mdelab.pvf import GRAPH_FIELDS

SPLIT = SplittingParticlePvf()
BINOMIAL = ConstantFiberPvf(make_measure([[-1.0], [1.0]], [0.5, 0.5]))


def cfg(scheme, T=1.0, N=8, **kw):
    return SchemeConfig(scheme=scheme, grid=GridSpec(T=T, N=N), **kw)


def _double_speed(mu):
    lift = eval_pvf(SPLIT, mu)
    return make_lifted(lift.positions, 2.0 * lift.velocities, lift.weights)


WRONG_SPEED = CustomPvf(_double_speed, name="doubled-splitting")


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------

def test_bump_value_and_support():
    f = TestFunction(center=np.array([0.0]), radius=2.0)
    assert f.value(np.array([[0.0]]))[0] == 1.0
    assert f.value(np.array([[2.0]]))[0] == 0.0
    assert f.value(np.array([[5.0]]))[0] == 0.0
    assert np.all(f.gradient(np.array([[2.5], [-3.0]])) == 0.0)
    v = f.value(np.array([[1.0]]))[0]
    assert v == pytest.approx((1 - 0.25) ** 3, abs=1e-15)


def test_bump_gradient_matches_finite_differences():
    rng = np.random.default_rng(41)
    for dim in (1, 2):
        center = rng.uniform(-1, 1, size=dim)
        radius = float(rng.uniform(0.5, 3.0))
        f = TestFunction(center=center, radius=radius)
        step = 1e-6 * radius
        for _ in range(30):
            x = center + rng.uniform(-radius, radius, size=dim) * 0.7
            grad = f.gradient(x[None, :])[0]
            for axis in range(dim):
                e = np.zeros(dim)
                e[axis] = step
                fd = (f.value((x + e)[None, :])[0] - f.value((x - e)[None, :])[0]) / (
                    2 * step
                )
                scale = max(1.0, abs(fd))
                assert abs(grad[axis] - fd) <= 1e-6 * scale


def test_bump_lipschitz_bound_is_sharp_supremum():
    f = TestFunction(center=np.array([0.0]), radius=1.7)
    xs = np.linspace(-1.7, 1.7, 20001)[:, None]
    grads = np.abs(f.gradient(xs))[:, 0]
    bound = f.lipschitz_bound()
    assert grads.max() <= bound + 1e-12
    assert grads.max() >= bound * (1.0 - 1e-6)


def test_bump_validation():
    with pytest.raises(ValueError):
        TestFunction(center=np.array([0.0]), radius=0.0)


def test_default_family_covers_inflated_hull():
    mus = [dirac(-1.0), dirac(3.0)]
    family = default_test_family(mus)
    assert len(family) == 9
    centers = np.array([f.center[0] for f in family])
    assert centers[0] == pytest.approx(1.0 - 1.2 * 2.0, abs=1e-12)
    assert centers[-1] == pytest.approx(1.0 + 1.2 * 2.0, abs=1e-12)
    # every atom is interior to every bump
    for f in family:
        assert f.value(np.array([[-1.0], [3.0]])).min() > 0.0


def test_default_family_degenerate_hull():
    family = default_test_family([dirac(0.5)])
    assert all(f.radius == 1.0 for f in family)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def test_residual_stationary_case_is_exact():
    path = mean_velocity_run(BINOMIAL, dirac(0.0), cfg(MEAN_VELOCITY))
    report = residual(path, BINOMIAL)
    assert report.max_defect == 0.0
    assert report.defects.shape == (9, 9)
    assert np.array_equal(report.times, path.times)


def test_residual_initial_node_defect_is_zero():
    path = lagrangian_run(SPLIT, dirac(0.0), cfg(LAGRANGIAN))
    report = residual(path, SPLIT)
    assert np.all(report.defects[:, 0] == 0.0)


def test_residual_shrinks_with_refinement():
    defects = {}
    for N in (8, 32):
        path = lagrangian_run(SPLIT, dirac(0.0), cfg(LAGRANGIAN, N=N))
        defects[N] = residual(path, SPLIT).max_defect
    assert defects[32] < defects[8]
    assert defects[8] > 0.0


def test_residual_flags_wrong_speed_path():
    true_path = lagrangian_run(SPLIT, dirac(0.0), cfg(LAGRANGIAN, N=32))
    wrong_path = lagrangian_run(WRONG_SPEED, dirac(0.0), cfg(LAGRANGIAN, N=32))
    family = default_test_family(list(true_path.measures) + list(wrong_path.measures))
    good = residual(true_path, SPLIT, family).max_defect
    bad = residual(wrong_path, SPLIT, family).max_defect
    assert bad > 2.0 * good


def test_residual_custom_family():
    path = lagrangian_run(SPLIT, dirac(0.0), cfg(LAGRANGIAN, N=4))
    f = TestFunction(center=np.array([0.0]), radius=5.0)
    report = residual(path, SPLIT, [f])
    assert report.defects.shape == (1, 5)


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------

def test_convergence_splitting_against_closed_form():
    def closed(t):
        xs, ws = oracles.splitting_dirac_atoms(0.0, t)
        return make_measure([[x] for x in xs], ws)

    table = convergence_study(SPLIT, dirac(0.0), LAS, [4, 8, 16], 1.0, reference=closed)
    assert table.mode == "reference"
    assert table.Ns == (4, 8, 16)
    for N, err in table.rows():
        assert err <= 1.0 / N**2 + 1e-9
    errs = list(table.errors)
    assert errs == sorted(errs, reverse=True) or max(errs) <= 1e-12


def test_convergence_binomial_matches_mad_oracle():
    table = convergence_study(
        BINOMIAL, dirac(0.0), LAS, [4, 16], 1.0, reference=lambda t: dirac(0.0)
    )
    for N, err in table.rows():
        assert err == pytest.approx(oracles.binomial_mad(N), abs=1e-12)
        assert err <= 1.0 / np.sqrt(N)


def test_convergence_mean_velocity_stationary_error_zero():
    table = convergence_study(
        SPLIT, dirac(2.0), MEAN_VELOCITY, [2, 4, 8], 1.0, reference=lambda t: dirac(2.0)
    )
    assert all(err == 0.0 for _, err in table.rows())


def test_convergence_against_reference_path():
    fine = las_run(SPLIT, dirac(0.0), cfg(LAS, N=64))
    table = convergence_study(SPLIT, dirac(0.0), LAS, [4, 16], 1.0, reference=fine)
    assert table.errors[1] <= table.errors[0] + 1e-12


def test_convergence_successive_mode():
    table = convergence_study(BINOMIAL, dirac(0.0), LAS, [2, 4, 8], 1.0)
    assert table.mode == "successive"
    assert table.Ns == (2, 4)
    # recompute the first successive gap by hand
    a = las_run(BINOMIAL, dirac(0.0), cfg(LAS, N=2))
    b = las_run(BINOMIAL, dirac(0.0), cfg(LAS, N=4))
    manual = max(
        w1_distance(interpolate_at(a, float(t)), interpolate_at(b, float(t)))
        for t in a.times
    )
    assert table.errors[0] == pytest.approx(manual, abs=1e-12)


def test_convergence_validates_refinement_order():
    with pytest.raises(ValueError):
        convergence_study(SPLIT, dirac(0.0), LAS, [8, 4], 1.0)
    with pytest.raises(ValueError):
        convergence_study(SPLIT, dirac(0.0), LAS, [4], 1.0)


# ---------------------------------------------------------------------------
# scheme comparison
# ---------------------------------------------------------------------------

def test_scheme_compare_graph_pvf_collapses():
    spec = GraphPvf(GRAPH_FIELDS["linear"])
    table = scheme_compare(spec, dirac(0.5), N=8, T=1.0)
    g = GridSpec(T=1.0, N=8)
    for _, _, gap in table.rows():
        assert gap <= g.dx + g.dv * 1.0


def test_scheme_compare_splitting_structure():
    table = scheme_compare(SPLIT, dirac(0.0), N=8, T=1.0)
    assert table.gap(LAS, LAGRANGIAN) <= 1e-12  # dyadic grid, schemes agree
    assert table.gap(LAS, MEAN_VELOCITY) == pytest.approx(1.0, abs=1e-12)
    assert table.gap(LAGRANGIAN, MEAN_VELOCITY) == pytest.approx(1.0, abs=1e-12)
    assert table.gap(MEAN_VELOCITY, LAS) == table.gap(LAS, MEAN_VELOCITY)
    with pytest.raises(KeyError):
        table.gap(LAS, "rk4")


def test_scheme_compare_binomial_gaps_shrink():
    coarse = scheme_compare(BINOMIAL, dirac(0.0), N=4, T=1.0)
    fine = scheme_compare(BINOMIAL, dirac(0.0), N=16, T=1.0)
    for a, b, gap in fine.rows():
        assert gap <= coarse.gap(a, b) + 1e-12
