import numpy as np
import pytest
from hypothesis import given, strategies as st

from skcollapse.errors import DomainError
from skcollapse.semiflat import (FamilyPoint, FibrationModel, dilation_identity_residual, fiber_geometry,
                                 semiflat_form, semiflat_hermitian, semiflat_potential)

from conftest import bundled_prepotential, constant_model


def test_potential_vanishes_on_real_points():
    z_period = np.array([[1j, 0.3], [0.3, 2j]])
    assert semiflat_potential(z_period, [0.7, -1.2]) == 0.0


def test_potential_hand_values():
    assert semiflat_potential([[1j]], [1j]) == pytest.approx(1.0, abs=1e-15)
    assert semiflat_potential([[2j]], [1j]) == pytest.approx(0.5, abs=1e-15)


def test_potential_singular_period():
    with pytest.raises(DomainError):
        semiflat_potential([[1.0]], [1j])


def test_fiber_block_identity_and_diagonal():
    np.testing.assert_allclose(semiflat_form(constant_model(1j * np.eye(3)), [0, 0, 0]), 0.5 * np.eye(3))
    np.testing.assert_allclose(semiflat_form(constant_model(np.diag([1j, 2j])), [0, 0]), np.diag([0.5, 0.25]))


def test_dilation_at_t_one_is_exact():
    model = constant_model(1j)
    samples = [(np.array([0.1j]), np.array([0.3 + 0.4j]))]
    assert dilation_identity_residual(model, 1.0, samples) == (0.0, 0.0)


def test_dilation_constant_period_quarter():
    model = constant_model(1j)
    grid = np.linspace(-1, 1, 9)
    samples = [(np.array([0j]), np.array([a + 1j * b])) for a in grid for b in grid]
    r1, r2 = dilation_identity_residual(model, 0.25, samples)
    assert r1 <= 1e-14 and r2 <= 1e-14


def test_dilation_mixed_period_small_t(models):
    model = models("period_model").value
    rng = np.random.default_rng(5)
    samples = [(np.array([rng.uniform(-1, 1) + 1j * rng.uniform(0, 1)]),
                np.array([rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)])) for _ in range(50)]
    r1, r2 = dilation_identity_residual(model, 1e-4, samples)
    assert r1 <= 1e-12 and r2 <= 1e-12


def test_dilation_rejects_t_outside_unit_interval():
    with pytest.raises(DomainError):
        dilation_identity_residual(constant_model(1j), 2.0, [])
    with pytest.raises(DomainError):
        FamilyPoint(constant_model(1j), np.zeros(1), np.zeros(1), 0.0)


def test_unit_square_fiber():
    model = constant_model(1j)
    g1 = fiber_geometry(model, [0j], 1.0)
    g16 = fiber_geometry(model, [0j], 1 / 16)
    assert g1.diameter == pytest.approx(np.sqrt(2) / 2, rel=1e-9)
    assert g16.diameter / g1.diameter == pytest.approx(0.5, rel=1e-9)
    assert g1.volume == pytest.approx(1.0) and g1.sf_volume == pytest.approx(1.0)


def test_volume_doubles_with_polarization():
    assert fiber_geometry(constant_model(1j, (2,)), [0j], 1.0).volume == pytest.approx(2.0)


def test_skewed_lattice_diameter():
    # hexagonal lattice Z = 1/2 + i sqrt(3)/2: covering radius of the unit triangle lattice is 1/sqrt(3)
    z = 0.5 + 1j * np.sqrt(3) / 2
    g = fiber_geometry(constant_model(z), [0j], 1.0)
    # fiber metric is (Im Z)^-1 times Euclidean
    assert g.diameter == pytest.approx((1 / np.sqrt(3)) / np.sqrt(np.sqrt(3) / 2), rel=1e-6)


# --- properties -----------------------------------------------------------

unit = st.floats(-1, 1, allow_nan=False)


@given(unit, unit, st.floats(0.2, 3), unit, unit)
def test_potential_nonnegative(a, b, h, x, y):
    z_period = np.array([[a + 1j * h]])
    eta = semiflat_potential(z_period, [x + 1j * y])
    assert eta >= 0
    if abs(y) > 1e-100:
        assert eta > 0
    if y == 0:
        assert eta == 0


@given(unit, st.floats(0.6, 1.9), unit, unit, st.integers(-2, 2), st.integers(-2, 2))
def test_semiflat_form_lattice_periodic(u, v, x, y, m1, m2):
    model = FibrationModel.from_prepotential(bundled_prepotential("cubic2"))
    w = np.array([u + 1j * v, 0.2 + 1j])
    z = np.array([x + 1j * y, 0.3 - 0.2j])
    m = np.array([m1, m2])
    zp, dz = model.period(w), model.dperiod(w)
    # z' = z + Z(w) m + integer shift; the holomorphic Jacobian mixes dw into dz
    jac = np.eye(4, dtype=complex)
    for c in range(2):
        jac[2:, c] = dz[:, :, c] @ m
    moved = z + zp @ m + np.array([m2, -m1])
    pulled = jac.T @ semiflat_hermitian(model, w, moved) @ np.conj(jac)
    np.testing.assert_allclose(pulled, semiflat_hermitian(model, w, z), atol=1e-10)


@given(st.floats(1e-4, 1.0))
def test_fiber_diameter_scales_with_quarter_power(t):
    model = constant_model(0.3 + 1.2j)
    d1 = fiber_geometry(model, [0j], 1.0, resolution=32).diameter
    dt = fiber_geometry(model, [0j], t, resolution=32).diameter
    assert dt == pytest.approx(t ** 0.25 * d1, rel=1e-12)


@given(st.integers(1, 5), st.integers(1, 5))
def test_fiber_volume_multiplicative_in_polarization(d1, d2):
    z = np.array([[1j, 0.2], [0.2, 1.5j]])
    vol = fiber_geometry(constant_model(z, (d1, d2)), [0j, 0j], 1.0, resolution=8, refine=False).volume
    assert vol == pytest.approx(np.linalg.det(z.imag) * d1 * d2, rel=1e-12)
