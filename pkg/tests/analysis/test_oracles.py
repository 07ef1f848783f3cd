import json
import math

import numpy as np
import pytest
import sympy as sp

from lpbox.analysis.kernels import dt_m_ou, mehler_ou
from lpbox.analysis.oracles import (
    EXTENDED_DIGITS,
    FDScheme,
    FixtureRecorder,
    compare_fixtures,
    evaluate_table,
    fd_time_derivative,
    gamma_integral,
    kernel_ring,
    load_fixtures,
    mehler_ou_extended,
    normal_form,
    symbolic_kernel_derivative,
    table_mismatches,
    teuwen_expansion_table,
    weyl_integral,
)
from lpbox.core.exceptions import ArgumentError, CapabilityError, IntegrabilityError


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_fd_derivatives_of_exponential(m):
    result = fd_time_derivative(lambda t: np.exp(-2.0 * t), 0.8, m)
    assert result.value == pytest.approx((-2.0) ** m * math.exp(-1.6), rel=1e-7)


def test_fd_is_vectorized_over_t():
    t = np.array([0.5, 1.0, 2.0])
    result = fd_time_derivative(np.sin, t, 1)
    np.testing.assert_allclose(result.value, np.cos(t), rtol=1e-9)


def test_fd_argument_checks():
    with pytest.raises(ArgumentError):
        fd_time_derivative(np.exp, 1.0, -1)
    with pytest.raises(ArgumentError):
        fd_time_derivative(np.exp, 0.5, 1, FDScheme(base_step=1.0))
    with pytest.raises(CapabilityError):
        fd_time_derivative(np.exp, 1.0, 1, FDScheme(base_step=1e-12))
    with pytest.raises(ArgumentError):
        FDScheme(order=4)


def test_fd_step_stays_inside_positive_times():
    scheme = FDScheme.for_time(0.05, 3)
    assert 0.05 - 3 * scheme.base_step > 0


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.5])
def test_weyl_integral_of_exponential(alpha):
    lam, t = 2.0, 0.3
    exact = lambda u, order: (-lam) ** order * np.exp(-lam * u)
    value = weyl_integral(lambda u: np.exp(-lam * u), t, alpha, derivative=exact)
    assert value == pytest.approx(lam**alpha * math.exp(-lam * t), rel=1e-8)


def test_weyl_integral_with_finite_differences():
    value = weyl_integral(lambda u: np.exp(-u), 0.5, 0.5)
    assert value == pytest.approx(math.exp(-0.5), rel=1e-6)


def test_weyl_integral_signed_output():
    exact = lambda u, order: (-1.0) ** order * np.exp(-u)
    normalized = weyl_integral(lambda u: np.exp(-u), 0.5, 0.5, derivative=exact)
    raw = weyl_integral(lambda u: np.exp(-u), 0.5, 0.5, signed=True, derivative=exact)
    assert raw == pytest.approx(-normalized)


def test_weyl_integral_rejects_growing_integrands():
    with pytest.raises(IntegrabilityError):
        weyl_integral(lambda u: u * u, 1.0, 0.5, derivative=lambda u, order: 2.0 * u)
    with pytest.raises(ArgumentError):
        weyl_integral(np.exp, 1.0, 0.0)


def test_gamma_integral():
    assert gamma_integral(0.5, 3.0) == pytest.approx(1.0233267, rel=1e-7)
    assert gamma_integral(2.0, 1.0) == pytest.approx(1.0)
    with pytest.raises(ArgumentError):
        gamma_integral(0.0, 1.0)


@pytest.mark.parametrize("m, n", [(0, 1), (1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (3, 2)])
def test_symbolic_derivative_matches_expansion_table(m, n):
    assert table_mismatches(symbolic_kernel_derivative(m, n), teuwen_expansion_table(m, n)) == []


@pytest.mark.parametrize("m", [1, 2, 3])
def test_uncorrected_table_is_a_negative_control(m):
    mismatches = table_mismatches(symbolic_kernel_derivative(m, 1), teuwen_expansion_table(m, 1, "uncorrected"))
    assert len(mismatches) >= 1


def test_symbolic_table_evaluates_to_closed_form():
    x, y, t = np.array([0.4, -0.2]), np.array([0.1, 0.7]), 0.6
    value = evaluate_table(symbolic_kernel_derivative(2, 2), x, y, t)
    assert value == pytest.approx(dt_m_ou(x, y, t, 2), rel=1e-11)


def test_symbolic_caps():
    with pytest.raises(CapabilityError):
        symbolic_kernel_derivative(4, 1)
    with pytest.raises(CapabilityError):
        teuwen_expansion_table(1, 3)


def test_fixture_record_and_replay(tmp_path):
    recorder = FixtureRecorder()
    recorder.record("square", {"x": 3.0}, 9.0)
    recorder.record("square", {"x": 2.0}, 4.0)
    document = recorder.to_document()
    assert [r["inputs"]["x"] for r in document] == [2.0, 3.0]

    path = tmp_path / "fixtures.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    loaded = load_fixtures(path)
    assert compare_fixtures(loaded, lambda op, inputs: inputs["x"] ** 2) == []
    drifted = compare_fixtures(loaded, lambda op, inputs: inputs["x"] ** 2 + 1e-3)
    assert len(drifted) == 2 and drifted[0]["fresh"] == pytest.approx(4.001)


def test_load_fixtures_rejects_non_lists(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"value": 1}', encoding="utf-8")
    with pytest.raises(ArgumentError):
        load_fixtures(path)


def test_fd_scheme_rejects_low_precision():
    with pytest.raises(ArgumentError):
        FDScheme(digits=10)
    assert FDScheme(digits=EXTENDED_DIGITS).step_floor(1.0) < 1e-30


def test_extended_kernel_matches_double_precision():
    x, y, t = np.array([0.3, -1.1]), np.array([-0.2, 0.4]), 0.7
    assert float(mehler_ou_extended(x, y, t)) == pytest.approx(mehler_ou(x, y, t), rel=1e-13)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_extended_precision_fd_matches_closed_form(m):
    x, y, t = np.array([0.3]), np.array([-0.2]), 0.7
    scheme = FDScheme.for_time(t, m, digits=EXTENDED_DIGITS)
    result = fd_time_derivative(lambda s: mehler_ou_extended(x, y, s), t, m, scheme)
    assert result.value == pytest.approx(float(dt_m_ou(x, y, t, m)), rel=1e-12)
    assert result.error < 1e-12


def test_extended_precision_fd_near_the_small_time_edge():
    x, y, t = np.array([1.4, -0.6]), np.array([-1.9, 0.8]), 0.05
    scheme = FDScheme.for_time(t, 3, digits=EXTENDED_DIGITS)
    result = fd_time_derivative(lambda s: mehler_ou_extended(x, y, s), t, 3, scheme)
    value = float(dt_m_ou(x, y, t, 3))
    assert abs(result.value - value) <= max(1e-7 * abs(value), 1e-9)


def test_double_precision_fd_searches_the_whole_tableau():
    x, y, t = np.array([0.3]), np.array([-0.2]), 0.7
    result = fd_time_derivative(lambda s: mehler_ou(x, y, s), t, 2, FDScheme.for_time(t, 2))
    assert result.value == pytest.approx(float(dt_m_ou(x, y, t, 2)), rel=1e-7)


def test_symbolic_tables_hold_exact_rationals():
    table = symbolic_kernel_derivative(2, 1)
    assert table
    assert all(isinstance(c, sp.Rational) for c in table.values())
    assert all(isinstance(c, sp.Rational) for c in teuwen_expansion_table(2, 1).values())


def test_normal_form_eliminates_the_mixed_square():
    gens = kernel_ring(1)
    a, b = gens[-2:]
    reduced = normal_form(a**2 * b**2, gens)
    assert reduced.as_expr() == sp.expand(b**2 - 1)
    assert all(not (mono[-2] >= 2 and mono[-1] >= 2) for mono in normal_form((a * b + a) ** 4, gens).monoms())
