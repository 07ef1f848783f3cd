import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from lpbox.analysis.quadrature import TimeGrid
from lpbox.analysis.regions import (
    BoundParameters,
    BoundSampler,
    JRegion,
    RegionSpec,
    branch_of,
    build_problem,
    global_pair_sampler,
    heat_difference_norm,
    in_local_region,
    kernel_time_norm,
    kernel_time_sampler,
    local_pair_sampler,
    local_radius,
    m_admissibility,
    report_from_ratios,
    run_problem,
    verify_bound,
)
from lpbox.core.exceptions import ArgumentError, CapabilityError, EvaluationError


def test_admissibility_function():
    assert m_admissibility([0.0, 0.0]) == 1.0
    assert m_admissibility([0.5]) == 1.0
    assert m_admissibility([3.0, 4.0]) == pytest.approx(1.0 / 25.0)
    np.testing.assert_allclose(local_radius(np.array([[0.0, 0.0], [3.0, 4.0]]), 1.0), [2.0, 0.4])


def test_local_region_is_strict():
    x = np.array([2.0])
    assert in_local_region(x, np.array([2.4]))
    assert not in_local_region(x, np.array([2.5]))
    assert not in_local_region(x, np.array([2.5 + 1e-12]), 1.0)
    assert RegionSpec(nu=2.0, dimension=1).contains(x, np.array([2.9]))
    with pytest.raises(ArgumentError):
        in_local_region(x, np.array([0.0, 0.0]))
    with pytest.raises(ArgumentError):
        RegionSpec(nu=0.0)


def test_branch_labels():
    assert branch_of([1.0, 0.0], [0.0, 1.0]) == "negative"
    assert branch_of([1.0], [2.0]) == "positive"
    labels = branch_of(np.array([[1.0], [-1.0]]), np.array([[1.0], [1.0]]))
    assert list(labels) == ["positive", "negative"]


def test_j_region_geometry(rng):
    region = JRegion(eta=2.0, dimension=2)
    lo, hi = region.bounds
    assert lo == pytest.approx(4.0 * 2.0 * math.sqrt(2.0) / 3.0)
    assert hi == pytest.approx(3.0 * math.sqrt(2.0))
    points = region.sample(rng, 200)
    assert np.all(region.contains(points))
    assert not region.contains(np.zeros(2))


def test_j_region_measure_matches_its_rule():
    region = JRegion(eta=1.5, dimension=2)
    _, log_w = region.rule(panels=64, points_per_panel=16, perp_points=32)
    assert float(np.logaddexp.reduce(log_w)) == pytest.approx(region.log_gamma_measure(), rel=1e-8)
    one = JRegion(eta=1.5, dimension=1)
    _, log_w1 = one.rule(panels=64, points_per_panel=16)
    assert float(np.logaddexp.reduce(log_w1)) == pytest.approx(one.log_gamma_measure(), rel=1e-10)


def test_j_region_measure_ratio_is_bounded_below():
    ratios = [JRegion(eta=eta, dimension=1).measure_ratio() for eta in (1.0, 2.0, 4.0)]
    assert min(ratios) > 0.1
    with pytest.raises(CapabilityError):
        JRegion(eta=1.0, dimension=3).rule()
    with pytest.raises(ArgumentError):
        JRegion(eta=0.0, dimension=1)


def test_report_from_ratios_fits_the_maximum():
    ratios = np.array([1.0, 2.0, 1.5, 2.1])
    report = report_from_ratios("demo", ratios, lambda i: {"index": i})
    assert report.fitted_constant == 2.1
    assert report.half_sample_constant == 2.0
    assert report.growth == pytest.approx(0.05)
    assert report.stable
    assert report.violations_at_fitted == 0
    assert report.max_ratio_location == {"index": 3}
    unstable = report_from_ratios("demo", np.array([1.0, 3.0]), lambda i: {})
    assert not unstable.stable
    with pytest.raises(ArgumentError):
        report_from_ratios("demo", np.array([]), lambda i: {})


def test_verify_bound_on_a_known_inequality():
    # |sin(s)| <= |s|, with C = 1 approached near s = 0
    sampler = BoundSampler(("s",), lambda rng, count: rng.uniform(-3.0, 3.0, size=(count, 1)))
    report = verify_bound("sine", sampler, lambda p: np.sin(p[:, 0]), lambda p: np.log(np.abs(p[:, 0])), 500, seed=3)
    assert report.samples == 1000
    assert report.fitted_constant <= 1.0
    assert report.fitted_constant > 0.99
    assert set(report.max_ratio_location) == {"s"}


def test_verify_bound_reports_non_finite_values():
    sampler = BoundSampler(("s",), lambda rng, count: np.ones((count, 1)))
    with pytest.raises(EvaluationError):
        verify_bound("bad", sampler, lambda p: np.full(len(p), np.nan), lambda p: np.zeros(len(p)), 4)


def test_global_sampler_respects_region_and_branch(rng):
    sampler = global_pair_sampler(2, nu=1.0, branch="positive")
    points = sampler.draw(rng, 300)
    x, y = points[:, :2], points[:, 2:]
    assert points.shape == (300, 4)
    assert not np.any(in_local_region(x, y, 1.0))
    assert np.all(np.sum(x * y, axis=-1) > 0)
    assert sampler.names == ("x1", "x2", "y1", "y2")


def test_local_sampler_stays_inside(rng):
    points = local_pair_sampler(1, nu=2.0).draw(rng, 300)
    assert np.all(in_local_region(points[:, :1], points[:, 1:], 2.0))


def test_kernel_time_sampler_columns(rng):
    sampler = kernel_time_sampler(2)
    points = sampler.draw(rng, 50)
    assert points.shape == (50, 5)
    assert sampler.names[-1] == "t"
    assert np.all((points[:, -1] > 0.999e-3) & (points[:, -1] < 10.001))


def test_kernel_time_norm_sup_and_lq():
    tgrid = TimeGrid(1e-6, 60.0, 512)
    x, y = np.array([[0.3]]), np.array([[0.8]])
    sup = kernel_time_norm(x, y, 1, (0,), math.inf, tgrid)
    l2 = kernel_time_norm(x, y, 1, (0,), 2.0, tgrid)
    assert sup.shape == (1,) and l2.shape == (1,)
    assert sup[0] > 0 and l2[0] > 0


def test_heat_difference_norm_is_finite_and_positive():
    tgrid = TimeGrid(1e-8, 1e4, 512)
    values = heat_difference_norm(np.array([[0.5], [2.0]]), np.array([[0.6], [2.05]]), 2.0, tgrid)
    assert np.all(np.isfinite(values)) and np.all(values > 0)


def test_bound_parameters_validation():
    with pytest.raises(ArgumentError):
        BoundParameters(eta=0.5, delta=0.6)
    with pytest.raises(ArgumentError):
        BoundParameters(dimension=2, k=(1,))
    with pytest.raises(ArgumentError):
        build_problem("zz", BoundParameters())


@pytest.mark.parametrize("bound_id", ["acot_deriv", "a2", "b", "c", "diferencia", "maximal_kernel"])
def test_every_bound_runs_on_a_small_sample(bound_id):
    params = BoundParameters(dimension=1, m=1, time_points=256)
    report = run_problem(build_problem(bound_id, params), samples=40, seed=11)
    assert report.bound_id == bound_id
    assert report.samples == 80
    assert math.isfinite(report.fitted_constant) and report.fitted_constant > 0
    assert report.violations_at_fitted == 0


def test_admissible_scale_is_comparable_to_the_inverse_distance_to_the_origin(rng):
    x = np.concatenate([rng.standard_normal((500, 3)) * 10.0 ** rng.uniform(-3, 3, size=(500, 1)), np.zeros((1, 3))])
    scale = np.sqrt(m_admissibility(x)) * (1.0 + np.linalg.norm(x, axis=-1))
    assert np.all(scale >= 0.5) and np.all(scale <= 2.0)


@pytest.mark.parametrize("nu", [0.25, 1.0, 3.0])
def test_local_radius_scales_with_nu_and_the_admissibility_function(rng, nu):
    x = rng.standard_normal((200, 2)) * 5.0
    radius = local_radius(x, nu)
    np.testing.assert_allclose(radius, nu * 2 * np.sqrt(m_admissibility(x)), rtol=1e-15)
    np.testing.assert_allclose(local_radius(x, 2 * nu), 2 * radius, rtol=1e-15)
    far = np.linalg.norm(x, axis=-1) >= 1.0
    np.testing.assert_allclose(radius[far] * np.linalg.norm(x[far], axis=-1), nu * 2, rtol=1e-12)


def test_admissibility_is_comparable_across_a_local_pair(rng):
    n, nu = 2, 1.0
    x = rng.standard_normal((400, n)) * 4.0
    direction = rng.standard_normal((400, n))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    y = x + 0.999 * local_radius(x, nu)[:, None] * direction
    assert np.all(in_local_region(x, y, nu))
    ratio = m_admissibility(y) / m_admissibility(x)
    bound = (1.0 + nu * n) ** 2
    assert np.all(ratio >= 1.0 / bound) and np.all(ratio <= bound)


@hyp_settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    n=st.integers(min_value=1, max_value=3),
    alpha=st.floats(min_value=0.05, max_value=20.0),
    nu=st.floats(min_value=0.1, max_value=4.0),
    spread=st.floats(min_value=0.01, max_value=50.0),
)
def test_local_region_scaling_law(seed, n, alpha, nu, spread):
    generator = np.random.default_rng(seed)
    u = generator.standard_normal(n) * spread
    direction = generator.standard_normal(n)
    v = u + 0.99 * generator.uniform() * local_radius(u, nu) * direction / np.linalg.norm(direction)
    assert in_local_region(u, v, nu)
    scaled_nu = alpha * nu if alpha < 1 else alpha * alpha * nu
    assert in_local_region(alpha * u, alpha * v, scaled_nu)
