"""Hyperkähler rotation of the semi-flat family.

Points of the total space are written in the real frame ``(y, x)`` with
``y`` Darboux coordinates on the base (``2n`` entries) and ``x`` fiber
coordinates on ``T*N`` (``2n`` entries, lattice ``Delta_d Z^n + Z^n``).
The holomorphic coordinates are ``w = w(y)`` and
``z = x[:n] - Z(w) x[n:]``.

Every 2-form is an antisymmetric ``4n x 4n`` matrix in the ``(dy, dx)``
frame; :func:`holomorphic_frame` gives the change of frame to ``(dw, dz)``.

Complex structures follow ``omega(u, v) = g(J u, v)``.  With that
convention the rotated complex structure ``J_t`` makes
``Im Omega + i omega_SF,t`` a (2,0)-form, and its holomorphic Darboux
coordinates are ``exp 2 pi i(-x_i + i t^-1/2 phi_i)``; the variant with
``+x_i`` has the same modulus but is ``J_t``-antiholomorphic.
"""

from dataclasses import dataclass

import numpy as np

from . import finite_diff as fd
from .errors import DomainError, ModelError
from .forms import hermitian_to_form, top_wedge, wedge_covectors
from .semiflat import FibrationModel, semiflat_hermitian
from .special_kahler import (affine_gradient, darboux_coordinates, darboux_hessian,
                             darboux_inverse, darboux_jacobian)


@dataclass(frozen=True)
class Frame:
    """Holomorphic data at a point of the total space.

    ``covectors`` holds ``dw_1..dw_n, dz_1..dz_n`` as complex rows over the
    real frame ``(dy, dx)``.
    """

    w: np.ndarray
    z: np.ndarray
    covectors: np.ndarray

    @property
    def real_jacobian(self):
        """``d(Re w, Re z, Im w, Im z) / d(y, x)``."""
        return np.vstack([self.covectors.real, self.covectors.imag])


def _prepotential(model):
    F = model.prepotential if isinstance(model, FibrationModel) else model
    if F is None:
        raise ModelError("Darboux coordinates need a prepotential, not just a period map")
    return F


def _as_model(model):
    return model if isinstance(model, FibrationModel) else FibrationModel.from_prepotential(model)


def holomorphic_frame(model, y, x, seed=None):
    F = _prepotential(model)
    n = F.n
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    w = darboux_inverse(F, y, seed)
    jac = darboux_jacobian(F, w)
    dw_dy = jac[:n] + 1j * jac[n:]
    zp = F.period(w)
    dz = F.dperiod(w)
    a, b = x[:n], x[n:]
    z = a - zp @ b
    dz_dy = -sum(np.outer(dz[:, :, c] @ b, dw_dy[c]) for c in range(n))
    cov = np.zeros((2 * n, 4 * n), dtype=complex)
    cov[:n, :2 * n] = dw_dy
    cov[n:, :2 * n] = dz_dy
    cov[n:, 2 * n:3 * n] = np.eye(n)
    cov[n:, 3 * n:] = -zp
    return Frame(w, z, cov)


def fiber_coordinates(zp, z):
    """Real fiber coordinates ``x`` with ``z = x[:n] - Z x[n:]``."""
    zp = np.asarray(zp, dtype=complex)
    z = np.asarray(z, dtype=complex)
    b = -np.linalg.solve(zp.imag, z.imag)
    a = z.real + zp.real @ b
    return np.concatenate([a, b])


def canonical_form(n):
    """``sum_{i<=2n} dy_i ^ dx_i``."""
    m = np.zeros((4 * n, 4 * n))
    for i in range(2 * n):
        m[i, 2 * n + i] = 1.0
        m[2 * n + i, i] = -1.0
    return m


@dataclass(frozen=True)
class HyperkahlerTriple:
    t: float
    omega_I: np.ndarray
    Omega: np.ndarray
    omega_J: np.ndarray
    Omega_J: np.ndarray
    I: np.ndarray
    J: np.ndarray
    metric: np.ndarray


@dataclass(frozen=True)
class RotationPoint:
    model: FibrationModel
    y: np.ndarray
    x: np.ndarray
    t: float


def family_forms(model, y, x, t, frame=None):
    """Base, semi-flat and family forms plus ``Omega`` in the ``(dy, dx)`` frame."""
    model = _as_model(model)
    n = model.n
    frame = frame or holomorphic_frame(model, y, x)
    base_h = np.zeros((2 * n, 2 * n))
    base_h[:n, :n] = model.base_metric(frame.w)
    base = hermitian_to_form(base_h, frame.covectors)
    sf = hermitian_to_form(semiflat_hermitian(model, frame.w, frame.z), frame.covectors)
    cov = frame.covectors
    omega = sum(wedge_covectors(cov[i], cov[n + i]) for i in range(n))
    return {"base": base, "semiflat": sf,
            "family": base / np.sqrt(t) + np.sqrt(t) * sf, "Omega": omega}


def rotate(point):
    """Rotate ``(omega_SF,t, Omega)`` into ``(Re Omega, Im Omega + i omega_SF,t)``."""
    if not point.t > 0:
        raise DomainError(f"t must be positive, got {point.t}")
    model = _as_model(point.model)
    n = model.n
    frame = holomorphic_frame(model, point.y, point.x)
    forms = family_forms(model, point.y, point.x, point.t, frame)
    omega_t = forms["family"]
    big = forms["Omega"]
    p = frame.real_jacobian
    zero = np.zeros((2 * n, 2 * n))
    eye = np.eye(2 * n)
    i_std = np.block([[zero, -eye], [eye, zero]])
    i_real = np.linalg.solve(p, i_std @ p)
    g = omega_t @ i_real
    g = 0.5 * (g + g.T)
    omega_j = big.real
    j_real = -np.linalg.solve(g, omega_j)
    return HyperkahlerTriple(point.t, omega_t, big, omega_j, big.imag + 1j * omega_t,
                             i_real, j_real, g)


def chi(model, y, x, t):
    """Holomorphic Darboux coordinates ``exp 2 pi i(-x_i + i t^-1/2 phi_i)``."""
    phi = affine_gradient(_prepotential(model), y)
    return np.exp(2j * np.pi * (-np.asarray(x, dtype=float) + 1j * t ** -0.5 * phi))


def log_chi(model, y, x, t, sign=-1, seed=None):
    phi = affine_gradient(_prepotential(model), y, seed)
    return 2j * np.pi * (sign * np.asarray(x, dtype=float) + 1j * t ** -0.5 * phi)


@dataclass(frozen=True)
class DarbouxCheck:
    canonical_residual: float
    imaginary_residual: float
    holomorphy_residual: float
    literal_antiholomorphy_residual: float
    expansion_residual: float
    modulus_residual: float


def verify_darboux(model, t, y, x, step=1e-5):
    """Check the Darboux identities of the rotated structure at one point.

    * ``canonical_residual``: ``|Re Omega - sum dy_i ^ dx_i|_max``.
    * ``imaginary_residual``: ``Im Omega`` against
      ``sum (dphi_{i+n} ^ dx_i - dphi_i ^ dx_{i+n})``.
    * ``holomorphy_residual``: largest ``|d chi(e) + i d chi(J e)| / |chi|``
      by central differences along frame vectors ``e`` and ``J_t e``.
    * ``literal_antiholomorphy_residual``: the same test with the sign of
      ``x`` flipped and ``-i`` in place of ``i``.
    * ``expansion_residual``: ``Omega_J`` against
      ``-(t^1/2 / 4 pi^2 i) sum dchi_i/chi_i ^ dchi_{i+n}/chi_{i+n}``.
    * ``modulus_residual``: relative error of ``|chi| = exp(-2 pi t^-1/2 phi)``.
    """
    model = _as_model(model)
    F = _prepotential(model)
    n = model.n
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    triple = rotate(RotationPoint(model, y, x, t))
    canonical = float(np.max(np.abs(triple.omega_J - canonical_form(n))))

    w = darboux_inverse(F, y)
    hess = darboux_hessian(F, w)
    dphi = np.zeros((2 * n, 4 * n))
    dphi[:, :2 * n] = hess
    dx = np.zeros((2 * n, 4 * n))
    dx[:, 2 * n:] = np.eye(2 * n)
    lemma_im = sum(wedge_covectors(dphi[n + i], dx[i]) - wedge_covectors(dphi[i], dx[n + i])
                   for i in range(n))
    imaginary = float(np.max(np.abs(triple.Omega.imag - lemma_im)))

    p0 = np.concatenate([y, x])
    dim = 4 * n

    def log_coords(p, sign):
        return log_chi(F, p[:2 * n], p[2 * n:], t, sign, seed=w)

    grads = {}
    for sign in (-1, 1):
        grads[sign] = fd.jacobian(lambda p: log_coords(p, sign), p0, step)
    hol = 0.0
    anti = 0.0
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        je = triple.J @ e
        d_plain = grads[-1] @ e
        d_rot = fd.directional(lambda p: log_coords(p, -1), p0, je, step)
        hol = max(hol, float(np.max(np.abs(d_plain + 1j * d_rot))))
        d_plain = grads[1] @ e
        d_rot = fd.directional(lambda p: log_coords(p, 1), p0, je, step)
        anti = max(anti, float(np.max(np.abs(d_plain - 1j * d_rot))))

    dl = grads[-1]
    expansion = -(np.sqrt(t) / (4 * np.pi ** 2 * 1j)) * sum(
        wedge_covectors(dl[i], dl[n + i]) for i in range(n))
    expansion_res = float(np.max(np.abs(expansion - triple.Omega_J)))

    phi = affine_gradient(F, y, w)
    values = chi(F, y, x, t)
    target = np.exp(-2 * np.pi * t ** -0.5 * phi)
    modulus = float(np.max(np.abs(np.abs(values) - target) / target))
    return DarbouxCheck(canonical, imaginary, hol, anti, expansion_res, modulus)


@dataclass(frozen=True)
class VolumeStats:
    ratios: np.ndarray
    mean: float
    max_relative_deviation: float


def volume_ratio(model, y, x, t):
    """``(omega_SF,t)^{2n} / (Omega^n ^ conj(Omega)^n)`` as top-form coefficients."""
    model = _as_model(model)
    n = model.n
    forms = family_forms(model, y, x, t)
    num = top_wedge([forms["family"]] * (2 * n))
    den = top_wedge([forms["Omega"]] * n + [np.conj(forms["Omega"])] * n)
    if abs(den) == 0:
        raise DomainError("degenerate holomorphic volume form")
    return complex(num / den)


def volume_identity_ratio(model, samples, calibration=None):
    """Ratio statistics over ``(w, z, t)`` samples.

    ``calibration`` is the constant measured once on a reference model;
    without it the sample mean is used.  The returned deviation is relative
    to that constant.
    """
    model = _as_model(model)
    F = _prepotential(model)
    ratios = []
    for w, z, t in samples:
        w = np.asarray(w, dtype=complex)
        y = darboux_coordinates(F, w)
        x = fiber_coordinates(F.period(w), z)
        r = volume_ratio(model, y, x, t)
        if abs(r.imag) > 1e-9 * abs(r):
            raise DomainError("volume ratio is not real")
        ratios.append(r.real)
    ratios = np.array(ratios)
    ref = float(np.mean(ratios)) if calibration is None else float(calibration)
    dev = float(np.max(np.abs(ratios - ref)) / abs(ref))
    return VolumeStats(ratios, ref, dev)
