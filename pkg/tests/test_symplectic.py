import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from skcollapse.errors import ConstraintError, ShapeError
from skcollapse.symplectic import (PolarizationType, adapted_form, fiber_form, pairing_residuals,
                                   siegel_check, standard_form, symplectic_check,
                                   symplectic_reduction)


def test_identity_and_shear_are_symplectic():
    assert symplectic_check(sp.eye(4), standard_form(2))
    assert symplectic_check([[1, 1], [0, 1]], standard_form(1))


def test_scaling_is_not_symplectic():
    assert not symplectic_check([[2, 0], [0, 1]], standard_form(1))


def test_symplectic_check_shape_errors():
    with pytest.raises(ShapeError):
        symplectic_check(sp.eye(4), standard_form(1))
    with pytest.raises(ShapeError):
        symplectic_check([[1, 2, 3], [4, 5, 6]], standard_form(1))


def test_rational_entries_are_exact():
    # [[1, 1/2], [0, 1]] preserves the standard 2x2 form over Q
    assert symplectic_check([["1", "1/2"], ["0", "1"]], standard_form(1))


def test_siegel_examples():
    c = siegel_check(1j * np.eye(2))
    assert c.valid and c.min_im_eigenvalue == pytest.approx(1.0, abs=1e-15)
    c = siegel_check([[1j, 1], [1, 1j]])
    assert c.valid and c.min_im_eigenvalue == pytest.approx(1.0, abs=1e-15)
    c = siegel_check([[1j, 2j], [2j, 1j]])
    assert not c.valid and c.min_im_eigenvalue == pytest.approx(-1.0, abs=1e-14)
    c = siegel_check([[1j, 1], [0, 1j]])
    assert not c.valid and c.symmetry_residual == 1.0


def test_siegel_shape_error():
    with pytest.raises(ShapeError):
        siegel_check(np.ones((2, 3), dtype=complex))


def test_forms_are_nondegenerate():
    for form in (standard_form(2), adapted_form((1, 3)), fiber_form((2, 5))):
        assert form.matrix.T == -form.matrix
        assert form.matrix.det() != 0


def test_polarization_must_be_positive():
    with pytest.raises(Exception):
        PolarizationType((0, 1))


def test_reduction_without_constraint_is_standard_basis():
    basis = symplectic_reduction(adapted_form((1,)), (1,))
    assert basis == sp.eye(2)


def test_reduction_with_rank_one_constraint():
    e1 = sp.Matrix([1, 0])
    basis = symplectic_reduction(standard_form(1), (1,), e1, e1)
    assert basis[:, 1] in (e1, -e1)
    assert all(v == 0 for v in pairing_residuals(basis, standard_form(1), (1,)).values())


def test_reduction_rejects_non_isotropic_constraint():
    with pytest.raises(ConstraintError):
        symplectic_reduction(standard_form(1), (1,), sp.eye(2))
    e = sp.eye(4)
    with pytest.raises(ConstraintError):
        symplectic_reduction(standard_form(2), (1, 1), e[:, 0], e[:, 0])  # W1 must be 3-dimensional


def test_reduction_shape_errors():
    with pytest.raises(ShapeError):
        symplectic_reduction(standard_form(2), (1,))
    with pytest.raises(ShapeError):
        symplectic_reduction(standard_form(1), (1,), sp.Matrix([1, 0, 0]))


# --- properties -----------------------------------------------------------

def _generator(kind, a, b, c):
    """Integral symplectic 4x4 generators for the standard form."""
    eye = sp.eye(2)
    zero = sp.zeros(2)
    s = sp.Matrix([[a, b], [b, c]])
    if kind == 0:
        return sp.BlockMatrix([[eye, s], [zero, eye]]).as_explicit()
    if kind == 1:
        return sp.BlockMatrix([[eye, zero], [s, eye]]).as_explicit()
    u = sp.Matrix([[1, a], [0, 1]])
    return sp.BlockMatrix([[u, zero], [zero, u.inv().T]]).as_explicit()


small = st.integers(-3, 3)
words = st.lists(st.tuples(st.integers(0, 2), small, small, small), min_size=1, max_size=5)


@given(words, words)
def test_products_of_symplectic_words_are_symplectic(w1, w2):
    form = standard_form(2)
    a = sp.eye(4)
    for g in w1:
        a = a * _generator(*g)
    b = sp.eye(4)
    for g in w2:
        b = b * _generator(*g)
    assert symplectic_check(a, form) and symplectic_check(b, form)
    assert symplectic_check(a * b, form)


herm = st.floats(-2, 2, allow_nan=False)


@given(st.lists(herm, min_size=3, max_size=3), st.lists(herm, min_size=3, max_size=3))
def test_siegel_invariant_under_transpose(re, im):
    z = np.array([[re[0], re[1]], [re[1], re[2]]]) + 1j * np.array([[im[0], im[1]], [im[1], im[2]]])
    a, b = siegel_check(z), siegel_check(z.T)
    assert a.valid == b.valid
    assert a.min_im_eigenvalue == b.min_im_eigenvalue


@given(st.lists(st.integers(1, 4), min_size=2, max_size=2),
       st.sampled_from([None, 0, 1, 2, 3]))
def test_reduction_satisfies_pairings_exactly(d, w0_index):
    form = standard_form(2)
    e = sp.eye(4)
    w0 = None if w0_index is None else e[:, w0_index]
    basis = symplectic_reduction(form, d, w0)
    res = pairing_residuals(basis, form, d)
    assert all(v == 0 for v in res.values())
    if w0 is not None:
        lag = basis[:, 2:]
        assert sp.Matrix.hstack(lag, w0).rank() == 2
