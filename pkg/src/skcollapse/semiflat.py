"""Semi-flat forms on abelian fibrations and the collapsing family.

Over a base point ``w`` with period matrix ``Z(w)`` the fiber is
``C^n / (Delta_d Z^n + Z(w) Z^n)``.  The semi-flat form is ``i ddbar eta``
with the fiberwise potential ``eta = Im(z)^T (Im Z)^-1 Im(z)``.  All
Hermitian matrices ``H`` here are coefficients of ``i sum H_ab dzeta_a ^
d(conj zeta_b)`` in the holomorphic frame ``zeta = (w, z)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SchemaError
from .lattice import flat_torus_diameter, lattice_volume, real_lattice_basis
from .polynomial import Polynomial
from .special_kahler import Box, Prepotential, _fmt_point, _number
from .symplectic import TOL_SYM, PolarizationType, siegel_check


class FibrationModel:
    """Abelian fibration over a special-coordinate box.

    The period map is either the Hessian of a prepotential or an explicit
    symmetric matrix-valued polynomial ``Z(w)``.
    """

    def __init__(self, period_poly, polarization, prepotential=None, domain=None):
        if len(period_poly.shape) != 2 or period_poly.shape[0] != period_poly.shape[1]:
            raise SchemaError("period map must be square matrix valued")
        if not period_poly.is_symmetric():
            raise SchemaError("period map is not symmetric")
        self.period_poly = period_poly
        self.dperiod_poly = period_poly.jacobian()
        self.n = period_poly.shape[0]
        self.polarization = polarization if isinstance(polarization, PolarizationType) \
            else PolarizationType(tuple(polarization))
        if self.polarization.n != self.n:
            raise SchemaError(f"polarization has {self.polarization.n} entries, expected {self.n}",
                              "polarization")
        self.prepotential = prepotential
        self.domain = domain if domain is not None else (prepotential.domain if prepotential else None)

    @classmethod
    def from_prepotential(cls, F, polarization=None):
        return cls(F.hess, polarization or (1,) * F.n, prepotential=F)

    @classmethod
    def from_json(cls, obj):
        if "polarization" not in obj:
            raise SchemaError("missing 'polarization'")
        if "prepotential" in obj:
            F = Prepotential.from_json(obj["prepotential"])
            return cls.from_prepotential(F, obj["polarization"])
        if "period_model" in obj:
            pm = obj["period_model"]
            n = int(pm["n"])
            poly = matrix_polynomial_from_json(pm["terms"], n, n)
            domain = Box.from_json(pm["domain"], n) if pm.get("domain") is not None else None
            return cls(poly, obj["polarization"], domain=domain)
        raise SchemaError("fibration model needs 'prepotential' or 'period_model'")

    def to_json(self):
        out = {"polarization": list(self.polarization.d)}
        if self.prepotential is not None:
            out["prepotential"] = self.prepotential.to_json()
        else:
            pm = {"n": self.n, "terms": matrix_polynomial_to_json(self.period_poly)}
            if self.domain is not None:
                pm["domain"] = self.domain.to_json()
            out["period_model"] = pm
        return out

    def period(self, w):
        return self.period_poly(np.asarray(w, dtype=complex))

    def dperiod(self, w):
        return self.dperiod_poly(np.asarray(w, dtype=complex))

    def base_metric(self, w):
        """``1/2 Im Z`` in the ``dw`` frame."""
        return 0.5 * self.period(w).imag

    def checked_period(self, w):
        z = self.period(w)
        check = siegel_check(z, TOL_SYM)
        if not check.valid:
            raise DomainError("period matrix is not in the Siegel space",
                              location=f"w={_fmt_point(np.asarray(w))}",
                              min_eigenvalue=check.min_im_eigenvalue)
        return z

    def validate(self, per_axis=5):
        if self.domain is None:
            return
        for w in self.domain.grid(per_axis):
            self.checked_period(w)


def matrix_polynomial_from_json(terms, n, nvars):
    """``[{"index": [...], "re": [[...]], "im": [[...]]}, ...]`` to a Polynomial."""
    coefs = {}
    for k, term in enumerate(terms):
        try:
            index = tuple(int(i) for i in term["index"])
            re = np.array([[_number(x) for x in row] for row in term.get("re", np.zeros((n, n)))])
            im = np.array([[_number(x) for x in row] for row in term.get("im", np.zeros((n, n)))])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed matrix term: {exc}", f"terms[{k}]") from exc
        if len(index) != nvars or re.shape != (n, n) or im.shape != (n, n):
            raise SchemaError("matrix term has the wrong shape", f"terms[{k}]")
        coefs[index] = coefs.get(index, 0) + re + 1j * im
    if not coefs:
        return Polynomial.zero(nvars, (n, n))
    return Polynomial.from_terms(nvars, coefs, (n, n))


def matrix_polynomial_to_json(poly):
    return [{"index": list(k), "re": c.real.tolist(), "im": c.imag.tolist()}
            for k, c in sorted(poly.to_terms().items())]


def semiflat_potential(z_period, z):
    """``eta = -1/4 sum (Im Z)^-1_ij (z_i - conj z_i)(z_j - conj z_j)``."""
    z_period = np.asarray(z_period, dtype=complex)
    z = np.asarray(z, dtype=complex)
    try:
        a = np.linalg.inv(z_period.imag)
    except np.linalg.LinAlgError as exc:
        raise DomainError("Im Z is singular") from exc
    s = z.imag
    return float(s @ a @ s)


def semiflat_form(model, w, z=None):
    """Fiber block ``1/2 (Im Z)^-1`` of the semi-flat form."""
    zp = model.checked_period(w)
    return 0.5 * np.linalg.inv(zp.imag)


def semiflat_hermitian(model, w, z):
    """Full Hermitian coefficient matrix of ``i ddbar eta`` on ``(w, z)``.

    With ``A = (Im Z)^-1``, ``s = Im z`` and ``Z_c = dZ/dw_c``::

        H_zz = A / 2
        H_{w_c, zbar} = -1/2 A Z_c A s
        H_{w_c, wbar_d} = 1/4 s^T (A Z_c A conj(Z_d) A + A conj(Z_d) A Z_c A) s
    """
    zp = model.checked_period(w)
    dz = model.dperiod(w)
    n = model.n
    a = np.linalg.inv(zp.imag)
    s = np.asarray(z, dtype=complex).imag
    h = np.zeros((2 * n, 2 * n), dtype=complex)
    h[n:, n:] = 0.5 * a
    azas = [a @ dz[:, :, c] @ a for c in range(n)]
    for c in range(n):
        h[c, n:] = -0.5 * azas[c] @ s
        h[n:, c] = np.conj(h[c, n:])
        for e in range(n):
            m = azas[c] @ np.conj(dz[:, :, e]) @ a + a @ np.conj(dz[:, :, e]) @ azas[c]
            h[c, e] = 0.25 * s @ m @ s
    return h


def family_form(model, w, z, t):
    """``t^-1/2 f*omega + t^1/2 omega_SF`` as a Hermitian matrix on ``(w, z)``."""
    n = model.n
    out = np.sqrt(t) * semiflat_hermitian(model, w, z)
    out[:n, :n] += model.base_metric(w) / np.sqrt(t)
    return out


@dataclass(frozen=True)
class FamilyPoint:
    """Point ``(w, z)`` of the total space together with a scale ``t``."""

    model: FibrationModel
    w: np.ndarray
    z: np.ndarray
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t}")

    def form(self):
        return family_form(self.model, self.w, self.z, self.t)


def dilation(n, t):
    """Jacobian of ``lambda_t(w, z) = (w, t^-1/2 z)``."""
    return np.diag(np.concatenate([np.ones(n), np.full(n, t ** -0.5)]))


def pullback_by_dilation(form_at, n, w, z, t):
    """``lambda_t^* H`` where ``form_at(w, z)`` evaluates a Hermitian form."""
    jac = dilation(n, t)
    return jac @ form_at(w, np.asarray(z) * t ** -0.5) @ jac


def dilation_identity_residual(model, t, samples):
    """Worst residuals of the two dilation identities over ``(w, z)`` samples.

    Returns ``(r1, r2)`` for ``t lambda_t^* omega_SF - omega_SF`` and
    ``lambda_t^*(t^1/2 omega_SF,t) - omega_SF,1``.
    """
    if not 0 < t <= 1:
        raise DomainError(f"t must lie in (0, 1], got {t}")
    n = model.n
    r1 = r2 = 0.0
    for w, z in samples:
        sf = semiflat_hermitian(model, w, z)
        lhs1 = t * pullback_by_dilation(lambda a, b: semiflat_hermitian(model, a, b), n, w, z, t)
        r1 = max(r1, float(np.max(np.abs(lhs1 - sf))))
        lhs2 = np.sqrt(t) * pullback_by_dilation(lambda a, b: family_form(model, a, b, t), n, w, z, t)
        r2 = max(r2, float(np.max(np.abs(lhs2 - family_form(model, w, z, 1.0)))))
    return r1, r2


def fiber_real_metric(model, w, t):
    """Riemannian fiber metric of ``g_SF,t`` on ``(Re z, Im z)``.

    The Hermitian block ``h = 1/2 A`` corresponds to the real metric
    ``2 Re(xi^H h xi)``, so the matrix is ``t^1/2 diag(A, A)``.
    """
    a = np.linalg.inv(model.checked_period(w).imag)
    zero = np.zeros_like(a)
    return np.sqrt(t) * np.block([[a, zero], [zero, a]])


@dataclass(frozen=True)
class FiberGeometry:
    volume: float
    diameter: float
    sf_volume: float


def fiber_geometry(model, w, t, resolution=None, refine=True):
    """Volume and diameter of the fiber over ``w`` at scale ``t``.

    ``volume`` is ``t^(n/2)`` times the Euclidean lattice covolume, which
    equals ``det(Im Z) prod d_k`` at ``t = 1``.  ``sf_volume`` is the
    Riemannian volume under the semi-flat fiber metric itself.
    ``diameter`` is the covering radius of the fiber lattice under that
    metric.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    zp = model.checked_period(w)
    basis = real_lattice_basis(zp, model.polarization.d)
    euclid = lattice_volume(basis)
    metric = fiber_real_metric(model, w, t)
    diam, _ = flat_torus_diameter(basis, metric, resolution, refine)
    sf_vol = euclid * np.sqrt(np.linalg.det(metric))
    return FiberGeometry(t ** (model.n / 2) * euclid, float(diam), float(sf_vol))
