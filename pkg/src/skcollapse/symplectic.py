"""Polarized symplectic lattices and the Siegel upper half space.

Lattice and monodromy computations are exact (sympy rationals); only the
Siegel eigenvalue test uses floating point.

Two pairing conventions appear in practice and both are provided:

* :func:`adapted_form` gives ``omega(v_i, v_{j+n}) = -delta_ij / d_i``, the
  normalization of the basis adapted to a weight filtration.
* :func:`fiber_form` gives ``omega(v_i, v_{j+n}) = d_i delta_ij``, the
  normalization of the semi-flat form on a fiber lattice.
"""

from dataclasses import dataclass

import numpy as np
import sympy as sp

from .errors import ConstraintError, ShapeError

TOL_SYM = 1e-10


@dataclass(frozen=True)
class PolarizationType:
    """Elementary divisors ``(d_1, ..., d_n)`` of a polarization."""

    d: tuple

    def __post_init__(self):
        d = tuple(int(x) for x in self.d)
        if not d:
            raise ShapeError("polarization type must be nonempty")
        if any(x < 1 for x in d):
            raise ConstraintError(f"polarization entries must be >= 1, got {d}")
        object.__setattr__(self, "d", d)

    @property
    def n(self):
        return len(self.d)

    @property
    def delta(self):
        """``Delta_d`` as an exact sympy matrix."""
        return sp.diag(*self.d)

    @property
    def delta_float(self):
        return np.diag(np.array(self.d, dtype=float))

    @property
    def product(self):
        return int(np.prod(self.d))


@dataclass(frozen=True)
class SymplecticForm:
    """Antisymmetric nondegenerate rational pairing on ``Q^{2n}``."""

    matrix: sp.Matrix

    def __post_init__(self):
        m = as_rational_matrix(self.matrix)
        if m.rows != m.cols or m.rows % 2:
            raise ShapeError(f"form must be square of even size, got {m.shape}")
        if m.T != -m:
            raise ConstraintError("form matrix is not antisymmetric")
        if m.det() == 0:
            raise ConstraintError("form matrix is degenerate")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.rows

    @property
    def n(self):
        return self.matrix.rows // 2

    def pair(self, u, v):
        return (as_rational_matrix(u).T * self.matrix * as_rational_matrix(v))


def standard_form(n):
    """``omega(e_i, e_{j+n}) = delta_ij``."""
    eye = sp.eye(n)
    zero = sp.zeros(n)
    return SymplecticForm(sp.BlockMatrix([[zero, eye], [-eye, zero]]).as_explicit())


def adapted_form(d):
    """Pairing with ``omega(v_i, v_{j+n}) = -delta_ij / d_i``."""
    d = _as_polarization(d)
    inv = sp.diag(*[sp.Rational(1, x) for x in d.d])
    zero = sp.zeros(d.n)
    return SymplecticForm(sp.BlockMatrix([[zero, -inv], [inv, zero]]).as_explicit())


def fiber_form(d):
    """Pairing with ``omega(v_i, v_{j+n}) = d_i delta_ij``."""
    d = _as_polarization(d)
    zero = sp.zeros(d.n)
    return SymplecticForm(sp.BlockMatrix([[zero, d.delta], [-d.delta, zero]]).as_explicit())


def as_rational_matrix(a):
    """Convert ints, strings like ``"1/2"``, Fractions or floats to exact rationals."""
    if isinstance(a, sp.MatrixBase):
        return sp.Matrix(a).applyfunc(sp.nsimplify)
    arr = np.asarray(a, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {arr.shape}")
    return sp.Matrix(arr.shape[0], arr.shape[1], [sp.Rational(str(x)) for x in arr.ravel()])


def symplectic_check(a, form):
    """True iff ``A^T Omega A == Omega`` in exact arithmetic."""
    a = as_rational_matrix(a)
    if a.rows != a.cols:
        raise ShapeError(f"matrix must be square, got {a.shape}")
    if a.rows != form.dim:
        raise ShapeError(f"matrix size {a.rows} does not match form dimension {form.dim}")
    return a.T * form.matrix * a == form.matrix


@dataclass(frozen=True)
class SiegelCheck:
    valid: bool
    min_im_eigenvalue: float
    symmetry_residual: float

    def __bool__(self):
        return self.valid


def siegel_check(z, tol=TOL_SYM):
    """Test membership of ``Z`` in the Siegel upper half space."""
    z = np.asarray(z, dtype=complex)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ShapeError(f"Z must be square, got shape {z.shape}")
    residual = float(np.max(np.abs(z - z.T))) if z.size else 0.0
    im = z.imag
    lam = float(np.linalg.eigvalsh(0.5 * (im + im.T))[0])
    return SiegelCheck(residual <= tol and lam > 0, lam, residual)


# -- exact subspace helpers -------------------------------------------------

def column_basis(m, dim=None):
    """Independent columns spanning the column space of ``m``."""
    m = as_rational_matrix(m) if not isinstance(m, sp.MatrixBase) else m
    if m.cols == 0:
        return sp.zeros(dim if dim is not None else m.rows, 0)
    cols = m.columnspace()
    if not cols:
        return sp.zeros(m.rows, 0)
    return sp.Matrix.hstack(*cols)


def kernel_basis(m):
    cols = m.nullspace()
    if not cols:
        return sp.zeros(m.cols, 0)
    return sp.Matrix.hstack(*cols)


def subspace_dim(basis):
    return 0 if basis.cols == 0 else basis.rank()


def contains(basis, v):
    """Is ``v`` in the span of the columns of ``basis``?"""
    if basis.cols == 0:
        return all(x == 0 for x in v)
    return sp.Matrix.hstack(basis, v).rank() == basis.rank()


def same_span(a, b):
    ra, rb = subspace_dim(a), subspace_dim(b)
    if ra != rb:
        return False
    if ra == 0:
        return True
    return sp.Matrix.hstack(a, b).rank() == ra


def symplectic_orthogonal(form, w):
    """Basis of ``W^perp = {v : omega(w, v) = 0 for all w in W}``."""
    if w.cols == 0:
        return sp.eye(form.dim)
    return kernel_basis(w.T * form.matrix)


def is_isotropic(form, w):
    return w.cols == 0 or (w.T * form.matrix * w).is_zero_matrix


def extend_to_lagrangian(form, w0, ambient=None):
    """Greedily extend the isotropic span of ``w0`` to a Lagrangian.

    Candidates are tried in the order ``e_{n+1..2n}``, ``e_{1..n}``, then a
    basis of the current symplectic orthogonal; the result stays inside
    ``ambient`` when it is given.
    """
    n, dim = form.n, form.dim
    s = column_basis(w0, dim)
    if not is_isotropic(form, s):
        raise ConstraintError("W0 is not isotropic")
    eye = sp.eye(dim)
    standard = [eye[:, j] for j in list(range(n, dim)) + list(range(n))]
    while subspace_dim(s) < n:
        perp = symplectic_orthogonal(form, s)
        pool = standard + [perp[:, j] for j in range(perp.cols)]
        for c in pool:
            if not contains(perp, c) or contains(s, c):
                continue
            if ambient is not None and not contains(ambient, c):
                continue
            s = c if s.cols == 0 else sp.Matrix.hstack(s, c)
            break
        else:
            raise ConstraintError("no Lagrangian extension found inside the given subspace")
    return s


def symplectic_reduction(form, d, w0=None, w1=None):
    """Adapted basis for a polarized form and an isotropic constraint.

    Returns a rational ``2n x 2n`` matrix whose columns ``v_1..v_2n`` satisfy
    ``omega(v_i, v_j) = omega(v_{i+n}, v_{j+n}) = 0``,
    ``omega(v_i, v_{j+n}) = -delta_ij / d_i`` and
    ``span(v_{n+1}, ..., v_{2n}) >= W0``.

    Parameters
    ----------
    form : SymplecticForm
    d : PolarizationType or sequence of int
    w0 : matrix, optional
        Columns spanning the isotropic subspace W0.
    w1 : matrix, optional
        Columns spanning W1; checked to equal the symplectic orthogonal of W0.
    """
    d = _as_polarization(d)
    n, dim = form.n, form.dim
    if d.n != n:
        raise ShapeError(f"polarization has {d.n} entries but the form has n={n}")
    w0 = sp.zeros(dim, 0) if w0 is None else as_rational_matrix(w0)
    if w0.rows != dim:
        raise ShapeError(f"W0 vectors must have {dim} entries")
    w0 = column_basis(w0, dim)
    if not is_isotropic(form, w0):
        raise ConstraintError("W0 is not isotropic")
    perp = symplectic_orthogonal(form, w0)
    if w1 is not None:
        w1 = as_rational_matrix(w1)
        if w1.rows != dim:
            raise ShapeError(f"W1 vectors must have {dim} entries")
        if not same_span(column_basis(w1, dim), perp):
            raise ConstraintError("W1 is not the symplectic orthogonal of W0")

    lag = extend_to_lagrangian(form, w0, ambient=perp)

    # complement of L from standard vectors
    eye = sp.eye(dim)
    comp = []
    current = lag
    for j in range(dim):
        if len(comp) == n:
            break
        if not contains(current, eye[:, j]):
            comp.append(eye[:, j])
            current = sp.Matrix.hstack(current, eye[:, j])
    c = sp.Matrix.hstack(*comp)

    pairing = c.T * form.matrix * lag
    inv_d = sp.diag(*[sp.Rational(1, x) for x in d.d])
    coeffs = -inv_d * pairing.inv()
    u = c * coeffs.T

    uu = u.T * form.matrix * u
    fix = sp.zeros(n)
    for i in range(n):
        for k in range(n):
            fix[i, k] = -sp.Rational(1, 2) * d.d[k] * uu[i, k]
    u = u + lag * fix.T
    basis = sp.Matrix.hstack(u, lag)
    residuals = pairing_residuals(basis, form, d)
    if any(r != 0 for r in residuals.values()):
        raise AssertionError(f"internal error: adapted basis fails pairings {residuals}")
    return basis


def pairing_residuals(basis, form, d):
    """Exact deviations of ``basis`` from the adapted pairing identities."""
    d = _as_polarization(d)
    n = d.n
    g = basis.T * form.matrix * basis
    target = -sp.diag(*[sp.Rational(1, x) for x in d.d])
    return {
        "lower": sp.Matrix(g[:n, :n]).norm(sp.oo),
        "upper": sp.Matrix(g[n:, n:]).norm(sp.oo),
        "mixed": sp.Matrix(g[:n, n:] - target).norm(sp.oo),
    }


def _as_polarization(d):
    return d if isinstance(d, PolarizationType) else PolarizationType(tuple(d))
