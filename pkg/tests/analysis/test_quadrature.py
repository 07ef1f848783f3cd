import math

import numpy as np
import pytest

from lpbox.analysis.quadrature import (
    TimeGrid,
    check_tail_decay,
    composite_legendre,
    gauss_hermite_grid,
    integrate,
    lp_norm,
    lq_from_samples,
    time_lq_norm,
)
from lpbox.core.exceptions import ArgumentError, CapabilityError, EvaluationError, IntegrabilityError


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gauss_grid_total_mass(n):
    grid = gauss_hermite_grid(12, n)
    assert integrate(grid, lambda x: np.ones(len(x))) == pytest.approx(math.pi ** (n / 2), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2])
def test_inverse_gauss_grid(n):
    # pi^{n/2} int e^{-2|y|^2} e^{|y|^2} dy = pi^n
    grid = gauss_hermite_grid(20, n, measure="inverse_gauss")
    value = integrate(grid, lambda y: np.exp(-2.0 * np.sum(y * y, axis=-1)))
    assert value == pytest.approx(math.pi**n, rel=1e-12)


def test_shifted_lebesgue_grid():
    grid = gauss_hermite_grid(12, 1, shift=[1.5], measure="lebesgue")
    value = integrate(grid, lambda y: np.exp(-(y[:, 0] - 1.5) ** 2) * y[:, 0] ** 2)
    assert value == pytest.approx(math.sqrt(math.pi) * (1.5**2 + 0.5), rel=1e-10)


def test_vector_valued_integrand():
    grid = gauss_hermite_grid(10, 1)
    value = integrate(grid, lambda x: np.stack([np.ones(len(x)), x[:, 0] ** 2], axis=-1))
    np.testing.assert_allclose(value, [math.sqrt(math.pi), math.sqrt(math.pi) / 2], rtol=1e-13)


def test_grid_argument_checks():
    with pytest.raises(ArgumentError):
        gauss_hermite_grid(1, 1)
    with pytest.raises(ArgumentError):
        gauss_hermite_grid(10, 1, scale=0.0)
    with pytest.raises(ArgumentError):
        gauss_hermite_grid(10, 1, measure="counting")
    with pytest.raises(CapabilityError):
        gauss_hermite_grid(200, 4)


def test_non_finite_integrand_reports_location():
    grid = gauss_hermite_grid(4, 1)
    with pytest.raises(EvaluationError) as info:
        integrate(grid, lambda x: np.where(x[:, 0] > 0, np.nan, 1.0))
    assert info.value.location is not None and info.value.location[0] > 0


def test_lp_norm_of_constant():
    grid = gauss_hermite_grid(8, 1)
    assert lp_norm(grid, lambda x: 2.0 * np.ones(len(x)), 3.0) == pytest.approx(2.0 * math.pi ** (1 / 6))
    assert lp_norm(grid, lambda x: np.zeros(len(x)), 2.0) == 0.0
    with pytest.raises(ArgumentError):
        lp_norm(grid, lambda x: np.ones(len(x)), 0.5)


def test_time_grid_reproduces_logarithm_of_window():
    grid = TimeGrid(1e-3, 1e3, 257)
    assert float(np.sum(grid.weights)) == pytest.approx(math.log(1e6), rel=1e-12)
    refined = grid.refined()
    np.testing.assert_allclose(refined.nodes[::2], grid.nodes, rtol=1e-14)


@pytest.mark.parametrize("q, expected", [
    # int (t e^{-t})^q dt/t = Gamma(q) q^{-q}
    (2.0, 0.5),
    (3.0, (2.0 / 27.0) ** (1 / 3)),
    (1.5, (math.gamma(1.5) * 1.5**-1.5) ** (1 / 1.5)),
])
def test_time_lq_norm(q, expected):
    grid = TimeGrid(1e-8, 64.0, 2048)
    assert time_lq_norm(grid, lambda t: t * np.exp(-t), q) == pytest.approx(expected, rel=1e-8)


def test_lower_tail_correction_recovers_truncated_window():
    # The missing piece on (0, 1e-2] comes from the power-law tail.
    grid = TimeGrid(1e-2, 64.0, 1024)
    value = time_lq_norm(grid, lambda t: t * np.exp(-t), 2.0)
    assert value == pytest.approx(0.5, rel=1e-4)


def test_lq_from_samples_axis_and_errors():
    grid = TimeGrid(1e-6, 50.0, 512)
    samples = np.stack([grid.nodes * np.exp(-grid.nodes), 2.0 * grid.nodes * np.exp(-grid.nodes)])
    norms = lq_from_samples(grid, samples.T, 2.0, axis=0)
    np.testing.assert_allclose(norms, [0.5, 1.0], rtol=1e-7)
    with pytest.raises(ArgumentError):
        lq_from_samples(grid, samples[:, :10], 2.0)
    with pytest.raises(EvaluationError):
        lq_from_samples(grid, np.full(512, np.inf), 2.0)
    with pytest.raises(ArgumentError):
        TimeGrid(1.0, 0.5, 32)


def test_composite_legendre():
    nodes, weights = composite_legendre([0.0, 1.0, 2.0], 4)
    assert float(np.sum(weights * nodes**3)) == pytest.approx(4.0, rel=1e-14)
    with pytest.raises(ArgumentError):
        composite_legendre([1.0, 0.0])


def test_tail_check():
    check_tail_decay(lambda x: np.exp(-2.0 * np.sum(x * x, axis=-1)), 2, degree=4)
    with pytest.raises(IntegrabilityError):
        check_tail_decay(lambda x: np.ones(len(x)), 1)
