import numpy as np
import pytest
from hypothesis import given, strategies as st

from skcollapse import finite_diff as fd
from skcollapse.errors import ChartError, DomainError
from skcollapse.special_kahler import (Box, Prepotential, darboux_coordinates, darboux_hessian,
                                       darboux_inverse, double_legendre, evaluate_chart,
                                       fd_darboux_hessian, kahler_potential, legendre_dual,
                                       monge_ampere_residual, ricci_vs_weil_petersson)

from conftest import bundled_prepotential, quadratic


def test_chart_of_quadratic_at_one():
    c = evaluate_chart(quadratic(), [1.0])
    assert c.w_star[0] == pytest.approx(1j)
    assert c.Z[0, 0] == 1j
    assert c.phi == pytest.approx(0.5, abs=1e-15)
    assert c.metric[0, 0] == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(c.darboux, [1.0, 0.0], atol=1e-15)


def test_chart_of_cubic_at_i(cubic):
    c = evaluate_chart(cubic, [1j])
    # w* = w^2/2 = -1/2, Z = w = i, phi = Im(w* conj w)/2 = 1/4
    assert c.w_star[0] == pytest.approx(-0.5)
    assert c.Z[0, 0] == pytest.approx(1j)
    assert c.phi == pytest.approx(0.25, abs=1e-15)
    assert c.metric[0, 0] == pytest.approx(0.5)


def test_chart_outside_siegel_space(cubic):
    with pytest.raises(DomainError) as err:
        evaluate_chart(cubic, [-1j])
    assert err.value.min_eigenvalue == pytest.approx(-1.0)


def test_monge_ampere_general_quadratic():
    # tau = 2 + 3i: phi_11 = b + a^2/b, phi_12 = a/b, phi_22 = 1/b by hand, det 1
    F = quadratic(1, 2 + 3j)
    w = np.array([0.3 + 0.2j])
    h = darboux_hessian(F, w)
    np.testing.assert_allclose(h, [[3 + 4 / 3, 2 / 3], [2 / 3, 1 / 3]], rtol=1e-14)
    pts = np.random.default_rng(1).normal(size=(20, 1)) * (1 + 1j)
    assert monge_ampere_residual(F, pts).max_residual <= 1e-10


def test_monge_ampere_identity_hessian():
    F = quadratic(2)
    pts = 0.3 * np.random.default_rng(2).normal(size=(10, 2)) + 1j
    assert monge_ampere_residual(F, pts).max_residual <= 1e-12
    np.testing.assert_allclose(darboux_hessian(F, pts[0]), np.eye(4), atol=1e-15)


def test_monge_ampere_cubic_near_2i(cubic):
    rng = np.random.default_rng(3)
    pts = 2j + rng.uniform(-0.3, 0.3, (50, 1)) + 1j * rng.uniform(-0.3, 0.3, (50, 1))
    assert monge_ampere_residual(cubic, pts, 1e-4).max_residual <= 1e-6


def test_monge_ampere_reports_singular_point(cubic):
    with pytest.raises(ChartError):
        monge_ampere_residual(cubic, [[0.5 + 0j]])


def test_metric_matches_ddbar_of_kahler_potential_at_three_steps():
    # the stencil error term vanishes for these polynomials, so all steps agree to rounding
    F = bundled_prepotential("cubic2")
    w = np.array([0.2 + 0.9j, -0.4 + 1.3j])
    exact = 0.5 * F.period(w).imag
    for h in (1e-2, 1e-3, 1e-4):
        approx = fd.complex_hessian(lambda p: kahler_potential(F, p), w, h)
        np.testing.assert_allclose(approx, exact, atol=1e-7)


def test_ricci_of_cubic_at_2i(cubic):
    # -ddbar log Im w = 1 / (4 (Im w)^2) = 1/16 at w = 2i
    r = ricci_vs_weil_petersson(cubic, (1,), [2j])
    assert r.ricci[0, 0].real == pytest.approx(0.0625, abs=1e-8)
    assert r.residual <= 1e-8


def test_ricci_vanishes_for_quadratic():
    r = ricci_vs_weil_petersson(quadratic(2), (1, 1), [1j, 1j])
    assert np.all(r.ricci == 0) and np.all(r.wp == 0) and r.residual == 0


def test_ricci_independent_of_polarization_scale(cubic):
    a = ricci_vs_weil_petersson(cubic, (1,), [0.3 + 2j])
    b = ricci_vs_weil_petersson(cubic, (3,), [0.3 + 2j])
    assert np.array_equal(a.ricci, b.ricci)
    assert np.array_equal(a.wp, b.wp)


def test_ricci_step_must_fit_domain(cubic):
    with pytest.raises(DomainError):
        ricci_vs_weil_petersson(cubic, (1,), [1.0005j])


def test_legendre_self_dual_for_quadratic():
    F = quadratic()
    y = np.array([0.4, -0.7])
    dual = legendre_dual(F, y)
    np.testing.assert_allclose(dual.hessian, np.eye(2), atol=1e-7)
    np.testing.assert_allclose(dual.dual_hessian, np.eye(2), atol=1e-7)
    np.testing.assert_allclose(dual.dual_coords, y, atol=1e-9)


def test_double_legendre_returns_start(cubic):
    rng = np.random.default_rng(4)
    for w in 0.4 * rng.uniform(-1, 1, 5) + 1j * rng.uniform(1.5, 2.5, 5):
        y = darboux_coordinates(cubic, [w])
        np.testing.assert_allclose(double_legendre(cubic, y), y, atol=1e-6)


def test_domain_validation_names_the_corner():
    F = Prepotential.from_terms(1, {(2,): 0.5j, (4,): 0.05}, Box([[-1, 1]], [[0, 1]]))
    with pytest.raises(DomainError) as err:
        F.validate_domain()
    assert "-1+1i" in str(err.value)


# --- properties -----------------------------------------------------------

coord = st.floats(-0.8, 0.8, allow_nan=False)
height = st.floats(0.7, 1.8, allow_nan=False)


@given(coord, height, coord, height)
def test_darboux_round_trip(u1, v1, u2, v2):
    F = bundled_prepotential("cubic2")
    w = np.array([u1 + 1j * v1, u2 + 1j * v2])
    back = darboux_inverse(F, darboux_coordinates(F, w))
    np.testing.assert_allclose(back, w, atol=1e-9)


@given(coord, height, coord, height)
def test_period_matrix_symmetric_exactly(u1, v1, u2, v2):
    z = bundled_prepotential("cubic2").period([u1 + 1j * v1, u2 + 1j * v2])
    assert np.array_equal(z, z.T)


@given(coord, height)
def test_fd_darboux_hessian_matches_closed_form(u, v):
    F = bundled_prepotential("cubic2")
    w = np.array([u + 1j * v, 0.1 + 1j])
    y = darboux_coordinates(F, w)
    np.testing.assert_allclose(fd_darboux_hessian(F, y), darboux_hessian(F, w), atol=1e-6)
    assert abs(np.linalg.det(darboux_hessian(F, w)) - 1) <= 1e-12
