import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skcollapse.rotation import (RotationPoint, canonical_form, chi, fiber_coordinates,
                                 holomorphic_frame, rotate, verify_darboux, volume_identity_ratio)
from skcollapse.semiflat import FibrationModel
from skcollapse.special_kahler import affine_gradient, darboux_coordinates

from conftest import bundled_prepotential, quadratic


def _model(name):
    if name == "quadratic":
        return FibrationModel.from_prepotential(quadratic())
    return FibrationModel.from_prepotential(bundled_prepotential(name))


def test_rotated_imaginary_part_is_family_form():
    model = _model("quadratic")
    tri = rotate(RotationPoint(model, np.array([0.2, -0.1]), np.array([0.3, 0.6]), 1.0))
    assert np.array_equal(tri.Omega_J.imag, tri.omega_I)
    assert np.isrealobj(tri.omega_J)


def test_darboux_identities_quadratic():
    chk = verify_darboux(_model("quadratic"), 1.0, np.array([0.2, -0.1]), np.array([0.3, 0.6]))
    assert chk.canonical_residual <= 1e-8
    assert chk.holomorphy_residual <= 1e-8
    assert chk.modulus_residual <= 1e-12


def test_darboux_identities_cubic_near_2i():
    F = bundled_prepotential("cubic")
    y = darboux_coordinates(F, [0.1 + 2j])
    chk = verify_darboux(_model("cubic"), 0.1, y, np.array([0.25, 0.4]))
    assert chk.canonical_residual <= 1e-6
    assert chk.holomorphy_residual <= 1e-6
    assert chk.expansion_residual <= 1e-6
    assert chk.modulus_residual <= 1e-12


def test_plus_x_variant_is_antiholomorphic():
    chk = verify_darboux(_model("quadratic"), 0.5, np.array([0.2, -0.1]), np.array([0.3, 0.6]))
    assert chk.literal_antiholomorphy_residual <= 1e-6
    assert chk.holomorphy_residual <= 1e-6


def test_omega_j_does_not_depend_on_t():
    model = _model("cubic")
    y = darboux_coordinates(model.prepotential, [0.3 + 1.7j])
    x = np.array([0.1, 0.9])
    forms = [rotate(RotationPoint(model, y, x, t)).omega_J for t in (1.0, 0.1, 0.01)]
    for f in forms[1:]:
        np.testing.assert_allclose(f, forms[0], atol=1e-12)
    np.testing.assert_allclose(forms[0], canonical_form(1), atol=1e-10)


def test_chi_modulus_and_unit_circle():
    F = bundled_prepotential("cubic")
    y = darboux_coordinates(F, [0.4 + 2.2j])
    phi = affine_gradient(F, y)
    for t in (1.0, 0.01):
        values = chi(F, y, [0.2, 0.7], t)
        np.testing.assert_allclose(np.abs(values), np.exp(-2 * np.pi * phi / np.sqrt(t)), rtol=1e-12)
    # phi_1 = Im w* and phi_2 = Im w; Im w* = Re(w) Im(w) vanishes on the imaginary axis
    y0 = darboux_coordinates(F, [2.2j])
    assert abs(chi(F, y0, [0.2, 0.7], 0.3)[0]) == pytest.approx(1.0, abs=1e-15)


def test_volume_ratio_quadratic(calibration):
    model = _model("quadratic")
    rng = np.random.default_rng(6)
    samples = [(np.array([rng.uniform(-1, 1) + 1j * rng.uniform(0.5, 2)]),
                np.array([rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)]), 10 ** rng.uniform(-3, 0))
               for _ in range(30)]
    stats = volume_identity_ratio(model, samples, calibration["ratio"]["1"])
    assert stats.max_relative_deviation <= 1e-12


def test_volume_ratio_cubic(calibration):
    model = _model("cubic")
    rng = np.random.default_rng(7)
    for t in (1.0, 0.01):
        samples = [(np.array([rng.uniform(-0.9, 0.9) + 1j * rng.uniform(1.1, 2.9)]),
                    np.array([rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)]), t) for _ in range(20)]
        stats = volume_identity_ratio(model, samples, calibration["ratio"]["1"])
        assert stats.max_relative_deviation <= 1e-8


def test_volume_ratio_two_dimensional(calibration):
    model = _model("cubic2")
    rng = np.random.default_rng(8)
    samples = [(rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(0.8, 1.6, 2),
                rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2), 10 ** rng.uniform(-2, 0))
               for _ in range(5)]
    stats = volume_identity_ratio(model, samples, calibration["ratio"]["2"])
    assert stats.max_relative_deviation <= 1e-8


def test_fiber_coordinates_round_trip():
    F = bundled_prepotential("cubic2")
    w = np.array([0.2 + 1.1j, -0.3 + 0.9j])
    z = np.array([0.4 - 0.2j, 0.1 + 0.5j])
    x = fiber_coordinates(F.period(w), z)
    frame = holomorphic_frame(F, darboux_coordinates(F, w), x)
    np.testing.assert_allclose(frame.w, w, atol=1e-10)
    np.testing.assert_allclose(frame.z, z, atol=1e-10)


# --- properties -----------------------------------------------------------

@settings(max_examples=20)
@given(st.floats(-0.8, 0.8), st.floats(1.2, 2.8), st.floats(0, 1), st.floats(0, 1),
       st.sampled_from([1.0, 0.1, 0.01]))
def test_complex_structures_square_to_minus_one(u, v, x1, x2, t):
    model = _model("cubic")
    y = darboux_coordinates(model.prepotential, [u + 1j * v])
    tri = rotate(RotationPoint(model, y, np.array([x1, x2]), t))
    eye = np.eye(4)
    np.testing.assert_allclose(tri.J @ tri.J, -eye, atol=1e-8)
    np.testing.assert_allclose(tri.I @ tri.I, -eye, atol=1e-10)
    np.testing.assert_allclose(tri.metric, tri.metric.T, atol=1e-12)
    assert np.linalg.eigvalsh(tri.metric)[0] > 0
