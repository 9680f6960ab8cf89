"""The dual torus fibration over the same affine base.

With ``phi_ij`` the Hessian of the affine potential in Darboux coordinates
``y``, the dual fibration carries fiber coordinates ``xv`` on
``R^{2n} / Z^{2n}``, holomorphic coordinates ``xi = exp 2 pi i(xv + i y)``
and the Kähler form ``t^-1/2 sum phi_ij dy_i ^ dxv_j``.  Its fiber metric
``t^-1/2 phi`` is inverse to the primal fiber metric ``t^1/2 phi^-1``.
B-fields are ignored.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ChartError, DomainError, ModelError
from .lattice import lattice_volume, real_lattice_basis
from .semiflat import FibrationModel, fiber_real_metric
from .special_kahler import darboux_hessian, darboux_inverse, fd_darboux_hessian


def _parts(model):
    if isinstance(model, FibrationModel):
        if model.prepotential is None:
            raise ModelError("the dual fibration needs a prepotential")
        return model, model.prepotential
    return FibrationModel.from_prepotential(model), model


def dual_holo_coords(y, xv):
    """``xi_i = exp 2 pi i (xv_i + i y_i)``."""
    y = np.asarray(y, dtype=float)
    xv = np.asarray(xv, dtype=float)
    return np.exp(2j * np.pi * (xv + 1j * y))


def transformed_dual_coords(A, b, y, xv):
    """Coordinates after ``y -> A y + b``, ``xv -> A xv`` computed two ways.

    Returns ``(direct, monomial)`` where ``monomial`` is
    ``exp(-2 pi b_i) prod_j xi_j^{A_ij}``; they agree for integral ``A``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    y = np.asarray(y, dtype=float)
    xv = np.asarray(xv, dtype=float)
    direct = dual_holo_coords(A @ y + b, A @ xv)
    xi = dual_holo_coords(y, xv)
    # integer powers of unit-modulus and real factors, kept separate for accuracy
    monomial = np.exp(-2 * np.pi * b) * np.prod(np.abs(xi)[None, :] ** A, axis=1) \
        * np.prod((xi / np.abs(xi))[None, :] ** A, axis=1)
    return direct, monomial


def dual_polarization(d):
    """``(d_n/d_n, ..., d_1/d_n)`` as exact fractions; metadata only."""
    d = [int(v) for v in d]
    return tuple(Fraction(v, d[-1]) for v in reversed(d))


@dataclass(frozen=True)
class DualFibrationPoint:
    y: np.ndarray
    xv: np.ndarray
    hessian: np.ndarray
    t: float

    @property
    def xi(self):
        return dual_holo_coords(self.y, self.xv)


def dual_point(F, y, xv, t, hessian="analytic", step=1e-4):
    """Evaluate the dual data at ``(y, xv)``; ``hessian`` is ``"analytic"`` or ``"fd"``."""
    _, F = _parts(F)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    y = np.asarray(y, dtype=float)
    if hessian == "fd":
        h = fd_darboux_hessian(F, y, step)
    else:
        h = darboux_hessian(F, darboux_inverse(F, y))
    ev = np.linalg.eigvalsh(0.5 * (h + h.T))
    if ev[0] <= 0:
        raise ChartError("affine Hessian is not positive definite", location=f"y={list(y)}")
    return DualFibrationPoint(y, np.asarray(xv, dtype=float), h, float(t))


def dual_form(point):
    """Mixed block ``t^-1/2 phi_ij`` of the dual Kähler form."""
    return point.hessian / np.sqrt(point.t)


def dual_form_matrix(point):
    """Full antisymmetric matrix of the dual Kähler form on ``(y, xv)``."""
    b = dual_form(point)
    z = np.zeros_like(b)
    return np.block([[z, b], [-b.T, z]])


def dual_volume_density(point):
    """``det`` of the mixed block; equals ``t^-n`` when the Monge-Ampère equation holds."""
    return float(np.linalg.det(dual_form(point)))


def primal_fiber_metric(model, y, t, seed=None):
    """``g_SF,t`` on the primal fiber in the real coordinates ``x``.

    Pulled back from ``(Re z, Im z)`` through ``z = x[:n] - Z x[n:]``.
    """
    model, F = _parts(model)
    n = model.n
    w = darboux_inverse(F, y, seed)
    zp = model.checked_period(w)
    p = np.block([[np.eye(n), -zp.real], [np.zeros((n, n)), -zp.imag]])
    return p.T @ fiber_real_metric(model, w, t) @ p


def t_duality_residual(model, y, t, hessian="analytic", step=1e-4):
    """``max |G_primal G_dual - I|`` at one base point."""
    model, F = _parts(model)
    point = dual_point(F, y, np.zeros(2 * model.n), t, hessian, step)
    prod = primal_fiber_metric(model, y, t) @ (point.hessian / np.sqrt(t))
    return float(np.max(np.abs(prod - np.eye(2 * model.n))))


def closedness_residual(F, y, step=1e-5):
    """Largest ``|d_k B_ij - d_i B_kj|`` of the dual form's block ``B`` by central differences."""
    _, F = _parts(F)
    y = np.asarray(y, dtype=float)
    seed = darboux_inverse(F, y)
    m = len(y)
    deriv = np.zeros((m, m, m))
    for k in range(m):
        e = np.zeros(m)
        e[k] = step
        hp = darboux_hessian(F, darboux_inverse(F, y + e, seed))
        hm = darboux_hessian(F, darboux_inverse(F, y - e, seed))
        deriv[k] = (hp - hm) / (2 * step)
    return float(np.max(np.abs(deriv - np.swapaxes(deriv, 0, 1))))


@dataclass(frozen=True)
class VolumeProduct:
    primal: float
    dual: float
    product: float
    expected: float


def fiber_volume_product(model, y, t):
    """Primal and dual fiber volumes and their product ``prod d_k``."""
    model, F = _parts(model)
    w = darboux_inverse(F, y)
    zp = model.checked_period(w)
    basis = real_lattice_basis(zp, model.polarization.d)
    primal = lattice_volume(basis) * np.sqrt(np.linalg.det(fiber_real_metric(model, w, t)))
    dual = np.sqrt(np.linalg.det(dual_form(dual_point(F, y, np.zeros(2 * model.n), t))))
    return VolumeProduct(float(primal), float(dual), float(primal * dual),
                         float(model.polarization.product))


__all__ = ["DualFibrationPoint", "VolumeProduct", "closedness_residual", "dual_form",
           "dual_form_matrix", "dual_holo_coords", "dual_point", "dual_polarization",
           "dual_volume_density", "fiber_volume_product", "primal_fiber_metric",
           "t_duality_residual", "transformed_dual_coords"]
