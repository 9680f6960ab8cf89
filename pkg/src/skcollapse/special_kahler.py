"""Special Kähler charts generated by a holomorphic prepotential.

For a prepotential ``F`` on a box in ``C^n``:

* ``w*_i = dF/dw_i`` and ``Z_ij = d^2F/dw_i dw_j``,
* the Kähler potential is ``phi = 1/2 Im(sum w*_i conj(w_i))`` and the
  metric is ``1/2 Im Z`` in the ``dw`` frame,
* Darboux coordinates are ``y = (Re w, -Re w*)``.

In Darboux coordinates the metric is the real Hessian of the *affine*
potential ``K = Im F - sum Im(w_i) Re(w*_i)``, whose gradient is
``(Im w*, Im w)``.  ``K`` and ``phi`` differ by a pluriharmonic function, so
both give the same Kähler form, but only ``K`` is a Hessian potential in
``y``.  Monge-Ampère and Legendre computations therefore use ``K``.
"""

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import finite_diff as fd
from .errors import ChartError, DomainError, SchemaError
from .lattice import lattice_volume, real_lattice_basis
from .polynomial import Polynomial
from .symplectic import TOL_SYM, PolarizationType, siegel_check


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``{re_lo <= Re w <= re_hi, im_lo <= Im w <= im_hi}``."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "re", np.asarray(self.re, dtype=float).reshape(-1, 2))
        object.__setattr__(self, "im", np.asarray(self.im, dtype=float).reshape(-1, 2))

    @classmethod
    def from_json(cls, obj, n):
        try:
            re = np.asarray(obj["re"], dtype=float).reshape(n, 2)
            im = np.asarray(obj["im"], dtype=float).reshape(n, 2)
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"domain must hold 're' and 'im' bounds for {n} coordinates: {exc}",
                              "domain") from exc
        if np.any(re[:, 0] > re[:, 1]) or np.any(im[:, 0] > im[:, 1]):
            raise SchemaError("domain bounds must be ordered low, high", "domain")
        return cls(re, im)

    def to_json(self):
        return {"re": self.re.tolist(), "im": self.im.tolist()}

    @property
    def center(self):
        return self.re.mean(axis=1) + 1j * self.im.mean(axis=1)

    def contains(self, w, margin=0.0):
        w = np.asarray(w, dtype=complex)
        return bool(np.all(w.real >= self.re[:, 0] + margin) and np.all(w.real <= self.re[:, 1] - margin)
                    and np.all(w.imag >= self.im[:, 0] + margin) and np.all(w.imag <= self.im[:, 1] - margin))

    def grid(self, per_axis=5):
        """Tensor grid with ``per_axis`` points on every real axis, corners included."""
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in self.re]
        axes += [np.linspace(lo, hi, per_axis) for lo, hi in self.im]
        n = len(self.re)
        pts = np.array(list(itertools.product(*axes)))
        return pts[:, :n] + 1j * pts[:, n:]

    def sample(self, rng, count, shrink=0.0):
        """Uniform random points, optionally keeping away from the faces."""
        n = len(self.re)
        lo_re = self.re[:, 0] + shrink * (self.re[:, 1] - self.re[:, 0])
        hi_re = self.re[:, 1] - shrink * (self.re[:, 1] - self.re[:, 0])
        lo_im = self.im[:, 0] + shrink * (self.im[:, 1] - self.im[:, 0])
        hi_im = self.im[:, 1] - shrink * (self.im[:, 1] - self.im[:, 0])
        return rng.uniform(lo_re, hi_re, (count, n)) + 1j * rng.uniform(lo_im, hi_im, (count, n))


class Prepotential:
    """Polynomial prepotential with exact derivatives up to third order."""

    def __init__(self, poly, domain=None):
        if poly.shape != ():
            raise ValueError("a prepotential is scalar valued")
        self.poly = poly
        self.n = poly.nvars
        self.domain = domain
        self.grad = poly.jacobian()
        self.hess = self.grad.jacobian()
        self.third = self.hess.jacobian()

    @classmethod
    def from_terms(cls, n, terms, domain=None):
        return cls(Polynomial.from_terms(n, terms), domain)

    @classmethod
    def from_json(cls, obj):
        try:
            n = int(obj["n"])
            terms = {}
            for k, term in enumerate(obj["terms"]):
                index = tuple(int(i) for i in term["index"])
                if len(index) != n:
                    raise SchemaError(f"multi-index length {len(index)} != n={n}", f"terms[{k}]")
                coef = _number(term.get("re", 0)) + 1j * _number(term.get("im", 0))
                terms[index] = terms.get(index, 0) + coef
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed prepotential: {exc}") from exc
        domain = Box.from_json(obj["domain"], n) if obj.get("domain") is not None else None
        return cls.from_terms(n, terms, domain)

    def to_json(self):
        terms = [{"index": list(k), "re": float(c.real), "im": float(c.imag)}
                 for k, c in sorted(self.poly.to_terms().items())]
        out = {"n": self.n, "terms": terms}
        if self.domain is not None:
            out["domain"] = self.domain.to_json()
        return out

    def value(self, w):
        return complex(self.poly(np.asarray(w, dtype=complex)))

    def w_star(self, w):
        return self.grad(np.asarray(w, dtype=complex))

    def period(self, w):
        """Period matrix ``Z(w)``; symmetric exactly for polynomials."""
        return self.hess(np.asarray(w, dtype=complex))

    def dperiod(self, w):
        """``dZ[i, j, c] = dZ_ij / dw_c``."""
        return self.third(np.asarray(w, dtype=complex))

    def validate_domain(self, per_axis=5, tol=TOL_SYM):
        """Certify ``Im Z > 0`` on a sample grid of the domain.

        Raises
        ------
        DomainError
            Naming the first failing sample and its minimal eigenvalue.
        """
        if self.domain is None:
            return
        for w in self.domain.grid(per_axis):
            check = siegel_check(self.period(w), tol)
            if not check.valid:
                raise DomainError("Im Z is not positive definite on the domain",
                                  location=f"w={_fmt_point(w)}", min_eigenvalue=check.min_im_eigenvalue)


@dataclass(frozen=True)
class SpecialChart:
    w: np.ndarray
    w_star: np.ndarray
    Z: np.ndarray
    phi: float
    affine_potential: float
    metric: np.ndarray
    darboux: np.ndarray


def evaluate_chart(F, w, tol=TOL_SYM):
    """All special-coordinate data of ``F`` at ``w``."""
    w = np.asarray(w, dtype=complex).reshape(F.n)
    ws = F.w_star(w)
    z = F.period(w)
    check = siegel_check(z, tol)
    if not check.valid:
        raise DomainError("Im Z is not positive definite", location=f"w={_fmt_point(w)}",
                          min_eigenvalue=check.min_im_eigenvalue)
    phi = 0.5 * float(np.sum(ws * np.conj(w)).imag)
    k = affine_potential_at(F, w)
    return SpecialChart(w=w, w_star=ws, Z=z, phi=phi, affine_potential=k,
                        metric=0.5 * z.imag, darboux=darboux_coordinates(F, w))


def kahler_potential(F, w):
    w = np.asarray(w, dtype=complex)
    return 0.5 * float(np.sum(F.w_star(w) * np.conj(w)).imag)


def affine_potential_at(F, w):
    w = np.asarray(w, dtype=complex)
    return float(F.value(w).imag - np.sum(w.imag * F.w_star(w).real))


def darboux_coordinates(F, w):
    w = np.asarray(w, dtype=complex)
    return np.concatenate([w.real, -F.w_star(w).real])


def darboux_inverse(F, y, seed=None, tol=1e-10, max_iter=50):
    """Solve ``darboux_coordinates(F, w) = y`` for ``w``.

    ``Re w`` is read off directly; ``Im w`` solves ``-Re w*(u + iv) = y2``
    by damped Newton iteration, whose Jacobian in ``v`` is ``Im Z``.  The
    seed is the best point of the forward map on a grid of the domain
    unless one is given.  After the step size drops below ``tol`` one
    extra Newton step polishes the result to machine precision.
    """
    y = np.asarray(y, dtype=float)
    n = F.n
    u, target = y[:n], y[n:]

    def residual(v):
        return -F.w_star(u + 1j * v).real - target

    if seed is not None:
        v = np.asarray(seed, dtype=complex).imag.astype(float) if np.iscomplexobj(seed) \
            else np.asarray(seed, dtype=float)
    else:
        v = _grid_seed(F, u, residual)
    r = residual(v)
    polished = False
    for _ in range(max_iter):
        jac = F.period(u + 1j * v).imag
        try:
            step = -np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise ChartError("singular coordinate change", location=f"y={_fmt_point(y)}") from exc
        lam = 1.0
        norm_r = np.linalg.norm(r)
        while True:
            v_new = v + lam * step
            r_new = residual(v_new)
            if np.linalg.norm(r_new) <= norm_r or lam < 1e-6:
                break
            lam *= 0.5
        v, r = v_new, r_new
        if np.linalg.norm(lam * step) <= tol * (1 + np.linalg.norm(v)):
            if polished:
                break
            polished = True
    else:
        if not polished:
            raise ChartError("Darboux inversion did not converge", location=f"y={_fmt_point(y)}")
    w = u + 1j * v
    if not siegel_check(F.period(w)).valid:
        raise ChartError("Darboux inversion left the Siegel domain", location=f"y={_fmt_point(y)}")
    return w


def _grid_seed(F, u, residual):
    if F.domain is not None:
        axes = [np.linspace(lo, hi, 5) for lo, hi in F.domain.im]
        candidates = np.array(list(itertools.product(*axes)))
    else:
        candidates = np.ones((1, F.n))
    norms = [np.linalg.norm(residual(c)) for c in candidates]
    return candidates[int(np.argmin(norms))].astype(float)


def affine_potential(F, y, seed=None):
    """``K(y)``: the Hessian potential of the metric in Darboux coordinates."""
    return affine_potential_at(F, darboux_inverse(F, y, seed))


def affine_gradient(F, y, seed=None):
    """``grad K(y) = (Im w*, Im w)``, the Legendre-dual coordinates."""
    w = darboux_inverse(F, y, seed)
    return np.concatenate([F.w_star(w).imag, w.imag])


def darboux_hessian(F, w):
    """Closed-form Hessian of ``K`` in Darboux coordinates at the point ``w``.

    With ``X = Re Z`` and ``Y = Im Z`` the matrix is
    ``[[Y + X Y^-1 X, X Y^-1], [Y^-1 X, Y^-1]]``.
    """
    z = F.period(np.asarray(w, dtype=complex))
    x, ym = z.real, z.imag
    yinv = np.linalg.inv(ym)
    return np.block([[ym + x @ yinv @ x, x @ yinv], [yinv @ x, yinv]])


def darboux_jacobian(F, w):
    """``d(u, v)/dy`` for ``w = u + i v``."""
    z = F.period(np.asarray(w, dtype=complex))
    n = F.n
    yinv = np.linalg.inv(z.imag)
    top = np.hstack([np.eye(n), np.zeros((n, n))])
    bottom = np.hstack([yinv @ z.real, yinv])
    return np.vstack([top, bottom])


def fd_darboux_hessian(F, y, step=1e-4):
    """Hessian of ``K`` by central differences of its gradient through the chart."""
    y = np.asarray(y, dtype=float)
    seed = darboux_inverse(F, y)
    h = fd.jacobian(lambda p: affine_gradient(F, p, seed), y, step)
    return 0.5 * (h + h.T)


@dataclass(frozen=True)
class MongeAmpereResult:
    max_residual: float
    residuals: np.ndarray
    worst_point: np.ndarray


def monge_ampere_residual(F, points, step=1e-4):
    """Worst ``|det(K_ij(y)) - 1|`` over special-coordinate sample points.

    The Hessian is taken in Darboux coordinates by finite differences
    through the coordinate change ``y -> w``.
    """
    points = np.asarray(points, dtype=complex).reshape(-1, F.n)
    res = np.empty(len(points))
    for k, w in enumerate(points):
        check = siegel_check(F.period(w))
        if not check.valid:
            raise ChartError("singular coordinate change", location=f"w={_fmt_point(w)}")
        h = fd_darboux_hessian(F, darboux_coordinates(F, w), step)
        res[k] = abs(np.linalg.det(h) - 1.0)
    worst = int(np.argmax(res))
    return MongeAmpereResult(float(res[worst]), res, points[worst])


@dataclass(frozen=True)
class RicciComparison:
    ricci: np.ndarray
    wp: np.ndarray
    residual: float
    richardson_gap: float


def fiber_volume(z, d):
    """Euclidean volume of ``C^n / (Delta_d Z^n + Z Z^n)``."""
    return lattice_volume(real_lattice_basis(z, d))


def _log_pivots(basis):
    lu, _ = scipy.linalg.lu_factor(basis)
    diag = np.abs(np.diag(lu))
    if np.any(diag == 0):
        raise DomainError("fiber lattice is degenerate")
    return np.log(diag)


def ricci_vs_weil_petersson(F, d, w, step=1e-3):
    """Ricci form of the base against the Weil-Petersson form of the fibers.

    Both are returned as Hermitian coefficient matrices ``R`` of
    ``i R_ij dw_i ^ d(conj w_j)``:
    ``ricci = -ddbar log det Im Z`` and ``wp = -ddbar log V`` with ``V``
    the Euclidean fiber volume computed from the lattice determinant.
    ``richardson_gap`` compares the ricci stencil at ``step`` and
    ``step / 2``.
    """
    d = d if isinstance(d, PolarizationType) else PolarizationType(tuple(d))
    w = np.asarray(w, dtype=complex)
    if F.domain is not None and not F.domain.contains(w, margin=2 * step):
        raise DomainError("step too large for the domain", location=f"w={_fmt_point(w)}")

    def log_det(p):
        return float(np.log(np.linalg.det(F.period(p).imag)))

    base_terms = _log_pivots(real_lattice_basis(F.period(w), d.d))

    def log_vol(p):
        # relative to w, pivot by pivot: constant factors such as det Delta cancel exactly
        return float(np.sum(_log_pivots(real_lattice_basis(F.period(p), d.d)) - base_terms))

    ricci = -fd.complex_hessian(log_det, w, step)
    wp = -fd.complex_hessian(log_vol, w, step)
    ricci_half = -fd.complex_hessian(log_det, w, step / 2)
    return RicciComparison(ricci, wp, float(np.max(np.abs(ricci - wp))),
                           float(np.max(np.abs(ricci - ricci_half))))


@dataclass(frozen=True)
class LegendreDual:
    y: np.ndarray
    dual_coords: np.ndarray
    hessian: np.ndarray
    dual_hessian: np.ndarray
    dual_potential: float


def legendre_dual(F, y, step=1e-5, hessian_step=1e-4):
    """Legendre transform of the affine potential at a Darboux point.

    Dual coordinates are central differences of ``K`` through the chart;
    the dual Hessian is the inverse of the Hessian of ``K``.
    """
    y = np.asarray(y, dtype=float)
    seed = darboux_inverse(F, y)
    x = fd.gradient(lambda p: affine_potential(F, p, seed), y, step)
    h = fd_darboux_hessian(F, y, hessian_step)
    if abs(np.linalg.det(h)) < 1e-12:
        raise ChartError("degenerate Hessian, no Legendre dual", location=f"y={_fmt_point(y)}")
    k = affine_potential(F, y, seed)
    return LegendreDual(y, x, h, np.linalg.inv(h), float(x @ y - k))


def inverse_legendre(F, x, seed_y=None, tol=1e-13, max_iter=50):
    """Solve ``grad K(y) = x`` by Newton's method with the closed-form Hessian."""
    x = np.asarray(x, dtype=float)
    if seed_y is None:
        center = F.domain.center if F.domain is not None else np.full(F.n, 1j)
        seed_y = darboux_coordinates(F, center)
    y = np.asarray(seed_y, dtype=float).copy()
    w = darboux_inverse(F, y)
    for _ in range(max_iter):
        r = np.concatenate([F.w_star(w).imag, w.imag]) - x
        step = -np.linalg.solve(darboux_hessian(F, w), r)
        y = y + step
        w = darboux_inverse(F, y, seed=w)
        if np.linalg.norm(step) <= tol * (1 + np.linalg.norm(y)):
            return y
    raise ChartError("inverse Legendre transform did not converge", location=f"x={_fmt_point(x)}")


def double_legendre(F, y, step=1e-5):
    """Apply the Legendre transform twice; returns a point close to ``y``."""
    y = np.asarray(y, dtype=float)
    x = legendre_dual(F, y, step).dual_coords

    def dual_potential(p):
        yy = inverse_legendre(F, p, seed_y=y)
        return float(p @ yy - affine_potential(F, yy))

    return fd.gradient(dual_potential, x, step)


def _number(v):
    if isinstance(v, str):
        from fractions import Fraction
        return float(Fraction(v))
    return float(v)


def _fmt_point(p):
    p = np.atleast_1d(p)
    if np.iscomplexobj(p):
        return "(" + ", ".join(f"{c.real:.6g}{c.imag:+.6g}i" for c in p) + ")"
    return "(" + ", ".join(f"{c:.6g}" for c in p) + ")"
