from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skcollapse.errors import ChartError, ModelError
from skcollapse.semiflat import FibrationModel
from skcollapse.special_kahler import darboux_coordinates
from skcollapse.syz import (closedness_residual, dual_form, dual_form_matrix, dual_holo_coords,
                            dual_point, dual_polarization, dual_volume_density,
                            fiber_volume_product, t_duality_residual, transformed_dual_coords)

from conftest import bundled_prepotential, constant_model, quadratic


def test_dual_coordinates_examples():
    np.testing.assert_array_equal(dual_holo_coords(np.zeros(2), np.zeros(2)), np.ones(2))
    xi = dual_holo_coords([1 / (2 * np.pi), 0.0], [0.0, 0.0])
    assert xi[0] == pytest.approx(np.exp(-1), rel=1e-15)


def test_dual_form_quadratic_blocks():
    F = quadratic()
    y = np.array([0.3, 0.1])
    np.testing.assert_allclose(dual_form(dual_point(F, y, np.zeros(2), 1.0)), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(dual_form(dual_point(F, y, np.zeros(2), 0.25)), 2 * np.eye(2), atol=1e-14)
    m = dual_form_matrix(dual_point(F, y, np.zeros(2), 1.0))
    np.testing.assert_array_equal(m, -m.T)


def test_t_duality_quadratic_exact():
    F = quadratic(2)
    for t in (1.0, 0.01):
        assert t_duality_residual(F, np.array([0.2, -0.4, 0.1, 0.3]), t) <= 1e-15


def test_t_duality_cubic():
    F = bundled_prepotential("cubic")
    rng = np.random.default_rng(10)
    ws = rng.uniform(-0.9, 0.9, 10) + 1j * rng.uniform(1.1, 2.9, 10)
    for t in (1.0, 0.01):
        for w in ws:
            y = darboux_coordinates(F, [w])
            assert t_duality_residual(F, y, t) <= 1e-8
            assert t_duality_residual(F, y, t, "fd") <= 1e-8


def test_dual_form_is_closed():
    F = bundled_prepotential("cubic2")
    y = darboux_coordinates(F, [0.2 + 1.1j, -0.1 + 0.8j])
    assert closedness_residual(F, y) <= 1e-6


def test_volume_product_and_density():
    model = FibrationModel.from_prepotential(bundled_prepotential("cubic"), (3,))
    y = darboux_coordinates(model.prepotential, [0.4 + 1.6j])
    products = [fiber_volume_product(model, y, t).product for t in (1.0, 0.1, 0.001)]
    np.testing.assert_allclose(products, 3.0, rtol=1e-10)
    for t in (1.0, 0.01):
        assert dual_volume_density(dual_point(model.prepotential, y, np.zeros(2), t)) == \
            pytest.approx(t ** -1, rel=1e-10)


def test_dual_polarization_metadata():
    assert dual_polarization((2, 6)) == (Fraction(1), Fraction(1, 3))
    assert dual_polarization((1,)) == (Fraction(1),)


def test_period_only_model_is_rejected():
    with pytest.raises(ModelError):
        t_duality_residual(constant_model(1j), np.zeros(2), 1.0)


def test_outside_chart_is_rejected():
    F = bundled_prepotential("cubic")
    # -Re w* = (v^2 - u^2) / 2 cannot equal -1 at u = 0, so no chart point has these coordinates
    with pytest.raises(ChartError):
        dual_point(F, np.array([0.0, -1.0]), np.zeros(2), 1.0)


def test_symplectic_change_acts_by_monomials():
    # A in Sp(2, Z) acting on (y1, y2)
    A = np.array([[2, 1], [1, 1]])
    direct, monomial = transformed_dual_coords(A, [0.3, -0.2], [0.05, 0.12], [0.7, 0.4])
    np.testing.assert_allclose(direct, monomial, rtol=1e-12)


# --- properties -----------------------------------------------------------

real = st.floats(-2, 2, allow_nan=False)


@given(real, real, real, real, st.integers(-5, 5), st.integers(-5, 5))
def test_dual_coordinates_periodic(y1, y2, x1, x2, k1, k2):
    a = dual_holo_coords([y1, y2], [x1, x2])
    b = dual_holo_coords([y1, y2], [x1 + k1, x2 + k2])
    np.testing.assert_allclose(a, b, rtol=1e-12)
    np.testing.assert_allclose(np.abs(a), np.exp(-2 * np.pi * np.array([y1, y2])), rtol=1e-12)


@settings(max_examples=20)
@given(st.floats(-0.8, 0.8), st.floats(1.2, 2.8), st.floats(1e-3, 1.0))
def test_volume_product_independent_of_t(u, v, t):
    F = bundled_prepotential("cubic")
    y = darboux_coordinates(F, [u + 1j * v])
    vp = fiber_volume_product(F, y, t)
    assert vp.product == pytest.approx(vp.expected, rel=1e-10)
