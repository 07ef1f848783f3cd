import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from lpbox.analysis.kernels import SubordinationRule, subordination_weights
from lpbox.analysis.special_functions import MultiIndex, hermite_tilde, hermite_tilde_l2_norm
from lpbox.analysis.spectral import (
    ZERO_MODE_FLAG,
    HermiteExpansion,
    apply_operator,
    coordinate_multiple,
    e0_projection,
    expand,
    heat_action,
    inner_product,
    intertwining_defect,
    inverse_sqrt,
    kernel_heat_action,
    kernel_poisson_action,
    ordinary_time_derivative,
    plancherel_check,
    poisson_action,
    polarization_check,
    riesz_transform,
    space_derivative,
    weyl_time_derivative,
)
from lpbox.core.exceptions import ArgumentError, CapabilityError


def _random_expansion(seed: int, n: int, terms: int = 5, max_entry: int = 4) -> HermiteExpansion:
    rng = np.random.default_rng(seed)
    chosen = {tuple(int(v) for v in rng.integers(0, max_entry + 1, size=n)) for _ in range(terms)}
    return HermiteExpansion.from_terms(n, {k: rng.standard_normal() for k in chosen})


def _relative(difference: float, f: HermiteExpansion) -> float:
    return difference / float(np.max(np.abs(f.coefficients)))


expansions = st.builds(
    _random_expansion,
    seed=st.integers(min_value=0, max_value=10_000),
    n=st.integers(min_value=1, max_value=3),
)


def test_from_terms_sums_repeated_indices_and_orders_by_degree():
    f = HermiteExpansion.from_terms(2, {(1, 0): 1.0, (0, 0): 2.0, MultiIndex((1, 0)): 0.5})
    assert [k.entries for k in f.indices] == [(0, 0), (1, 0)]
    np.testing.assert_allclose(f.coefficient((1, 0)), [1.5])
    np.testing.assert_allclose(f.coefficient((0, 1)), [0.0])


def test_construction_checks():
    with pytest.raises(ArgumentError):
        HermiteExpansion(1, (MultiIndex((1,)), MultiIndex((1,))), np.ones(2))
    with pytest.raises(ArgumentError):
        HermiteExpansion(2, (MultiIndex((1,)),), np.ones(1))
    with pytest.raises(CapabilityError):
        HermiteExpansion.eigenfunction((25,))


def test_evaluate_matches_hermite_tilde():
    x = np.array([[0.5, -0.3], [1.2, 0.1]])
    f = HermiteExpansion.from_terms(2, {(2, 1): 1.5, (0, 3): -0.5})
    expected = 1.5 * hermite_tilde((2, 1), x) - 0.5 * hermite_tilde((0, 3), x)
    values = f.evaluate(x)
    assert values.shape == (2, 1)
    np.testing.assert_allclose(values[:, 0], expected, rtol=1e-13)
    np.testing.assert_allclose(f(x), expected, rtol=1e-13)


def test_vector_expansions_stack_and_split():
    a = HermiteExpansion.eigenfunction((1,), 2.0)
    b = HermiteExpansion.eigenfunction((3,), -1.0)
    v = HermiteExpansion.stack([a, b])
    assert v.vector_dim == 2
    np.testing.assert_allclose(v.component(1).coefficient((3,)), [-1.0])
    x = np.array([[0.4]])
    np.testing.assert_allclose(v.evaluate(x)[0], [a(x)[0], b(x)[0]])
    with pytest.raises(ArgumentError):
        HermiteExpansion.stack([])


def test_document_round_trip():
    f = HermiteExpansion.stack([_random_expansion(1, 2), _random_expansion(2, 2)])
    again = HermiteExpansion.from_document(f.to_document().model_dump())
    assert again.max_coefficient_difference(f) == 0.0


def test_heat_and_poisson_multipliers():
    f = HermiteExpansion.eigenfunction((1, 2), 3.0)
    assert heat_action(f, 0.5).coefficient((1, 2))[0] == pytest.approx(3.0 * math.exp(-2.5))
    assert poisson_action(f, 0.5).coefficient((1, 2))[0] == pytest.approx(3.0 * math.exp(-0.5 * math.sqrt(5)))
    assert poisson_action(f, 0.5, "A_minus_I").coefficient((1, 2))[0] == pytest.approx(3.0 * math.exp(-1.0))
    with pytest.raises(ArgumentError):
        heat_action(f, -1.0)


def test_zero_mode_is_flagged_for_a_minus_i_in_one_dimension():
    f = HermiteExpansion.eigenfunction((0,), 1.0)
    out = poisson_action(f, 2.0, "A_minus_I")
    assert ZERO_MODE_FLAG in out.flags
    assert out.coefficient((0,))[0] == 1.0
    assert ZERO_MODE_FLAG not in poisson_action(f, 2.0).flags


def test_weyl_derivative_of_integer_order_matches_ordinary_derivative():
    f = _random_expansion(7, 2)
    weyl = weyl_time_derivative(f, 0.3, 2.0)
    ordinary = ordinary_time_derivative(f, 0.3, 2)
    assert _relative(weyl.max_coefficient_difference(ordinary), f) < 1e-13
    first = weyl_time_derivative(f, 0.3, 1.0)
    assert _relative(first.max_coefficient_difference(-ordinary_time_derivative(f, 0.3, 1)), f) < 1e-13
    with pytest.raises(ArgumentError):
        weyl_time_derivative(f, 0.0, 0.5)
    with pytest.raises(ArgumentError):
        weyl_time_derivative(f, 0.3, 0.0)


def test_space_derivative_matches_finite_differences():
    f = HermiteExpansion.from_terms(1, {(0,): 0.7, (2,): -0.4, (3,): 0.1})
    x, h = 0.35, 1e-5
    derivative = space_derivative(f, (1,))(np.array([[x]]))[0]
    fd = (f(np.array([[x + h]]))[0] - f(np.array([[x - h]]))[0]) / (2 * h)
    assert derivative == pytest.approx(fd, rel=1e-7)
    with pytest.raises(ArgumentError):
        space_derivative(f, (1, 0))


def test_coordinate_multiple_is_multiplication_by_x_i():
    f = _random_expansion(3, 2)
    x = np.array([[0.3, -0.8], [1.1, 0.4]])
    np.testing.assert_allclose(coordinate_multiple(f, 2)(x), x[:, 1] * f(x), rtol=1e-12, atol=1e-12)
    with pytest.raises(ArgumentError):
        coordinate_multiple(f, 3)


@given(expansions)
@hyp_settings(max_examples=30, deadline=None)
def test_operator_acts_by_its_eigenvalues(f):
    expected = f.scaled(f.eigenvalues("heat_A"))
    assert _relative(apply_operator(f).max_coefficient_difference(expected), expected) < 1e-14


@given(expansions)
@hyp_settings(max_examples=30, deadline=None)
def test_riesz_transform_is_derivative_of_inverse_sqrt(f):
    for i in range(1, f.dimension + 1):
        riesz = riesz_transform(f, i)
        direct = space_derivative(inverse_sqrt(f), MultiIndex.unit(f.dimension, i - 1))
        assert riesz.max_coefficient_difference(direct) == 0.0


@given(expansions, st.sampled_from([0.1, 1.0, 3.0]))
@hyp_settings(max_examples=30, deadline=None)
def test_intertwining_identity(f, t):
    for i in range(1, f.dimension + 1):
        assert _relative(intertwining_defect(f, t, i), f) < 1e-14


def test_riesz_index_is_one_based():
    f = HermiteExpansion.eigenfunction((0, 0))
    assert riesz_transform(f, 2).coefficient((0, 1))[0] == pytest.approx(-1.0 / math.sqrt(2.0))
    with pytest.raises(ArgumentError):
        riesz_transform(f, 0)


def test_e0_projection_and_inner_product():
    f = HermiteExpansion.from_terms(1, {(0,): 2.0, (2,): 1.0})
    assert e0_projection(f).coefficient((0,))[0] == 2.0
    assert e0_projection(HermiteExpansion.eigenfunction((1,))).is_zero()
    expected = 4.0 * hermite_tilde_l2_norm(0) ** 2 + hermite_tilde_l2_norm(2) ** 2
    assert inner_product(f, f) == pytest.approx(expected, rel=1e-14)


def test_expand_recovers_eigenfunction_coefficients():
    f = expand(lambda x: 2.0 * hermite_tilde((2,), x) - hermite_tilde((5,), x), 1, 8)
    np.testing.assert_allclose(f.coefficient((2,)), [2.0], atol=1e-12)
    np.testing.assert_allclose(f.coefficient((5,)), [-1.0], atol=1e-12)
    assert abs(f.coefficient((3,))[0]) < 1e-12


def test_polarization_identity_one_dimension():
    f = _random_expansion(11, 1, terms=6, max_entry=10)
    g = _random_expansion(12, 1, terms=6, max_entry=10)
    h = f + g * (0.1 * math.sqrt(inner_product(f, f) / inner_product(g, g)))
    result = polarization_check(f, h)
    assert result.spectral_error < 1e-12
    assert result.quadrature_error < 1e-6


@pytest.mark.parametrize("m, k", [(1, (0,)), (0, (1,)), (2, (1,))])
def test_plancherel_formula_against_quadrature(m, k):
    f = _random_expansion(5, 1, terms=4, max_entry=6)
    formula, quadrature = plancherel_check(f, m, k)
    assert quadrature == pytest.approx(formula, rel=1e-6)


def test_plancherel_needs_positive_power():
    with pytest.raises(ArgumentError):
        plancherel_check(HermiteExpansion.eigenfunction((1,)), 0, (0,))


@pytest.mark.parametrize("n", [1, 2])
def test_kernel_heat_action_matches_spectral_action(n, rng):
    f = _random_expansion(21, n, terms=4, max_entry=4)
    x = rng.uniform(-1.5, 1.5, size=(3, n))
    spectral = heat_action(f, 0.5).evaluate(x)
    kernel = kernel_heat_action(f.evaluate, 0.5, x)
    np.testing.assert_allclose(kernel, spectral, rtol=1e-9, atol=1e-12 * np.max(np.abs(spectral)))


def test_kernel_heat_action_with_time_derivative():
    f = HermiteExpansion.from_terms(1, {(1,): 1.0, (3,): 0.5})
    x = np.array([[0.2], [0.9]])
    spectral = ordinary_time_derivative(f, 0.7, 1).evaluate(x)
    kernel = kernel_heat_action(f.evaluate, 0.7, x, m=1)
    np.testing.assert_allclose(kernel, spectral, rtol=1e-8)


def test_kernel_poisson_action_matches_spectral_action():
    f = HermiteExpansion.eigenfunction((0,))
    x = np.array([[0.3], [-0.7]])
    spectral = poisson_action(f, 0.8).evaluate(x)
    kernel = kernel_poisson_action(f.evaluate, 0.8, x)
    np.testing.assert_allclose(kernel, spectral, rtol=1e-6)


@pytest.mark.parametrize("m", [0, 1, 2])
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 2.0, 5.0])
def test_subordinated_heat_actions_reproduce_poisson_multipliers(t, m):
    f = HermiteExpansion.from_terms(2, {(0, 0): 1.0, (1, 0): -0.5, (2, 1): 2.0, (3, 3): 0.25})
    tau, weights = subordination_weights(t, m, SubordinationRule(), "A", 2)
    subordinated = sum(w * heat_action(f, float(s)).coefficients for s, w in zip(tau, weights))
    expected = ordinary_time_derivative(f, t, m, "poisson_A").coefficients
    np.testing.assert_allclose(subordinated, expected, rtol=1e-7, atol=0.0)
