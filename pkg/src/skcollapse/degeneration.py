"""Monodromy, weight filtrations and nilpotent-orbit period models.

Lattice computations are exact.  A nilpotent-orbit model is the period map

    Z(t) = Q(t) + sum_p (log t_p / 2 pi i) Delta_d eta_p,

on the punctured polydisc, with an explicit integer winding vector choosing
the branch of each logarithm.
"""

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .errors import (ConstraintError, DegenerateModelError, ModelError, NotQuasiUnipotentError,
                     PolarizationIncompatibilityError, SchemaError, ShapeError)
from .polynomial import Polynomial
from .semiflat import matrix_polynomial_from_json, matrix_polynomial_to_json
from .special_kahler import _fmt_point, _number
from .symplectic import (TOL_SYM, PolarizationType, SymplecticForm, as_rational_matrix,
                         column_basis, extend_to_lagrangian, is_isotropic, same_span,
                         siegel_check, standard_form, subspace_dim, symplectic_check,
                         symplectic_orthogonal)

UNIPOTENCY_BOUND = 60


@dataclass(frozen=True)
class MonodromyRep:
    """Commuting integral symplectic matrices."""

    generators: tuple
    form: SymplecticForm
    polarization: PolarizationType

    def __post_init__(self):
        gens = tuple(as_rational_matrix(g) for g in self.generators)
        if not gens:
            raise ShapeError("a monodromy representation needs at least one generator")
        for k, g in enumerate(gens):
            if g.shape != (self.form.dim, self.form.dim):
                raise ShapeError(f"generator {k} has shape {g.shape}, expected {self.form.dim}^2")
            if any(not x.is_integer for x in g):
                raise ConstraintError("monodromy matrices must be integral", f"generators[{k}]")
            if not symplectic_check(g, self.form):
                raise ConstraintError("generator does not preserve the form", f"generators[{k}]")
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                if gens[a] * gens[b] != gens[b] * gens[a]:
                    raise ConstraintError(f"generators {a} and {b} do not commute")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_json(cls, obj):
        try:
            gens = obj["generators"]
            first = as_rational_matrix(gens[0])
            n = first.rows // 2
            form = SymplecticForm(as_rational_matrix(obj["form"])) if obj.get("form") else standard_form(n)
            pol = PolarizationType(tuple(obj.get("polarization", [1] * n)))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed monodromy representation: {exc}") from exc
        return cls(tuple(gens), form, pol)

    def to_json(self):
        return {"generators": [[[int(x) for x in g.row(i)] for i in range(g.rows)] for g in self.generators],
                "form": [[str(x) for x in self.form.matrix.row(i)] for i in range(self.form.dim)],
                "polarization": list(self.polarization.d)}


@dataclass(frozen=True)
class UnipotentReduction:
    orders: tuple
    rep: MonodromyRep


def is_unipotent(t):
    eye = sp.eye(t.rows)
    return ((t - eye) ** 2).is_zero_matrix


def reduce_to_unipotent(rep, bound=UNIPOTENCY_BOUND):
    """Smallest ``m_i`` with ``(T_i^m_i - I)^2 = 0`` for every generator."""
    orders = []
    powers = []
    for k, t in enumerate(rep.generators):
        power = sp.eye(t.rows)
        for m in range(1, bound + 1):
            power = power * t
            if is_unipotent(power):
                orders.append(m)
                powers.append(power)
                break
        else:
            raise NotQuasiUnipotentError(f"no order <= {bound} makes the generator unipotent",
                                         f"generators[{k}]")
    return UnipotentReduction(tuple(orders), MonodromyRep(tuple(powers), rep.form, rep.polarization))


@dataclass(frozen=True)
class WeightFiltration:
    W0: sp.Matrix
    W1: sp.Matrix
    L: sp.Matrix
    logarithms: tuple = field(default=())

    @property
    def dims(self):
        return subspace_dim(self.W0), subspace_dim(self.W1)


def weight_filtration(rep):
    """``W0 = sum Im N_i``, ``W1 = intersection ker N_i`` and a Lagrangian between them."""
    form = rep.form
    dim = form.dim
    logs = []
    for k, t in enumerate(rep.generators):
        if not is_unipotent(t):
            raise ConstraintError("generator is not unipotent; reduce first", f"generators[{k}]")
        logs.append(t - sp.eye(dim))
    w0 = column_basis(sp.Matrix.hstack(*logs), dim)
    w1 = column_basis(_kernel(sp.Matrix.vstack(*logs)), dim)
    if not is_isotropic(form, w0):
        raise PolarizationIncompatibilityError("W0 is not isotropic")
    if not same_span(w1, symplectic_orthogonal(form, w0)):
        raise PolarizationIncompatibilityError("W1 is not the symplectic orthogonal of W0")
    lag = extend_to_lagrangian(form, w0, ambient=w1)
    return WeightFiltration(w0, w1, lag, tuple(logs))


def _kernel(m):
    cols = m.nullspace()
    if not cols:
        return sp.zeros(m.cols, 0)
    return sp.Matrix.hstack(*cols)


class NilpotentOrbitModel:
    """Period model ``Z(t) = Q(t) + sum_p (log t_p / 2 pi i) Delta_d eta_p``.

    Parameters
    ----------
    Q : Polynomial
        Symmetric ``n x n`` matrix valued polynomial in ``t_1..t_n``.
    residues : list of sympy matrices
        ``eta_1..eta_k``, rational and symmetric.
    polarization : PolarizationType
    orbifold_orders : tuple of int
    frame : Polynomial, optional
        Vector valued map ``w(t)``; ``dw`` is the holomorphic frame.
        Defaults to ``w = t``.
    """

    def __init__(self, Q, residues, polarization, orbifold_orders=None, frame=None):
        self.n = Q.shape[0]
        self.k = len(residues)
        if Q.shape != (self.n, self.n) or Q.nvars != self.n:
            raise SchemaError("Q must be an n x n matrix polynomial in n variables", "Q")
        if not Q.is_symmetric():
            raise ModelError("Q(t) is not symmetric", "Q")
        if self.k > self.n:
            raise SchemaError(f"k={self.k} residues exceed n={self.n}", "residues")
        self.Q = Q
        self.residues = tuple(as_rational_matrix(r) for r in residues)
        for p, eta in enumerate(self.residues):
            if eta.shape != (self.n, self.n):
                raise SchemaError("residue has the wrong shape", f"residues[{p}]")
            if eta != eta.T:
                raise ModelError("residue is not symmetric", f"residues[{p}]")
        self.polarization = polarization if isinstance(polarization, PolarizationType) \
            else PolarizationType(tuple(polarization))
        if self.polarization.n != self.n:
            raise SchemaError("polarization length differs from n", "polarization")
        self.orbifold_orders = tuple(int(m) for m in (orbifold_orders or (1,) * self.k))
        if len(self.orbifold_orders) != self.k or any(m < 1 for m in self.orbifold_orders):
            raise SchemaError("need one positive orbifold order per divisor component",
                              "orbifold_orders")
        self.frame = frame if frame is not None else Polynomial.variables(self.n)
        if self.frame.shape != (self.n,) or self.frame.nvars != self.n:
            raise SchemaError("frame must map C^n to C^n", "frame")
        self.frame_jacobian = self.frame.jacobian()
        delta = self.polarization.delta_float
        self._log_coeffs = [delta @ np.array(eta.tolist(), dtype=float) for eta in self.residues]

    @classmethod
    def from_json(cls, obj):
        try:
            n = int(obj["n"])
            k = int(obj["k"])
            Q = matrix_polynomial_from_json(obj["Q"], n, n)
            residues = [as_rational_matrix(r) for r in obj["residues"]]
            frame = None
            if obj.get("frame") is not None:
                frame = vector_polynomial_from_json(obj["frame"], n)
            model = cls(Q, residues, obj.get("polarization", [1] * n),
                        obj.get("orbifold_orders"), frame)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed nilpotent orbit model: {exc}") from exc
        if model.k != k:
            raise SchemaError(f"k={k} but {model.k} residues given", "k")
        return model

    def to_json(self):
        out = {"n": self.n, "k": self.k, "Q": matrix_polynomial_to_json(self.Q),
               "residues": [[[str(x) for x in eta.row(i)] for i in range(self.n)] for eta in self.residues],
               "polarization": list(self.polarization.d),
               "orbifold_orders": list(self.orbifold_orders)}
        out["frame"] = vector_polynomial_to_json(self.frame)
        return out

    def epsilon(self, i):
        """``1`` for divisor directions (``i < k``), else ``0``."""
        return 1 if i < self.k else 0

    def validate_residues(self, tol=1e-12):
        """Residue positivity on the upper-left ``nu x nu`` block, ``nu = rank(sum eta_p)``.

        Each ``eta_p`` must be positive semidefinite and supported in that
        block, and their sum must be positive definite there.
        """
        if self.k == 0:
            return 0
        total = sum(self.residues, sp.zeros(self.n))
        nu = total.rank()
        for p, eta in enumerate(self.residues):
            outside = eta.copy()
            outside[:nu, :nu] = sp.zeros(nu)
            if not outside.is_zero_matrix:
                raise ModelError(f"residue is not supported in the upper-left {nu}x{nu} block",
                                 f"residues[{p}]")
            ev = np.linalg.eigvalsh(np.array(eta.tolist(), dtype=float))
            if ev[0] < -tol:
                raise ModelError("residue is not positive semidefinite", f"residues[{p}]")
        block = np.array(total[:nu, :nu].tolist(), dtype=float)
        if nu and np.linalg.eigvalsh(block)[0] <= tol:
            raise ModelError("residues are not positive definite on their block", "residues")
        return nu

    def sample_points(self, rng, count, radius=0.5):
        """Random points of the punctured polydisc of the given radius."""
        r = radius * rng.uniform(0.05, 1.0, (count, self.n)) ** 2
        theta = rng.uniform(-np.pi, np.pi, (count, self.n))
        return r * np.exp(1j * theta)


def vector_polynomial_from_json(terms, n):
    coefs = {}
    for k, term in enumerate(terms):
        try:
            index = tuple(int(i) for i in term["index"])
            re = np.array([_number(x) for x in term.get("re", [0] * n)])
            im = np.array([_number(x) for x in term.get("im", [0] * n)])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed frame term: {exc}", f"frame[{k}]") from exc
        if len(index) != n or re.shape != (n,) or im.shape != (n,):
            raise SchemaError("frame term has the wrong shape", f"frame[{k}]")
        coefs[index] = coefs.get(index, 0) + re + 1j * im
    return Polynomial.from_terms(n, coefs, (n,))


def vector_polynomial_to_json(poly):
    return [{"index": list(k), "re": c.real.tolist(), "im": c.imag.tolist()}
            for k, c in sorted(poly.to_terms().items())]


def _check_point(model, t):
    t = np.asarray(t, dtype=complex).reshape(model.n)
    mod = np.abs(t[:model.k])
    if np.any(mod <= 0) or np.any(mod >= 1):
        raise DegenerateModelError("divisor coordinates must satisfy 0 < |t_p| < 1",
                                   location=f"t={_fmt_point(t)}")
    return t


def period_map_eval(model, t, branch=None, tol=TOL_SYM):
    """``Z(t)`` on the chosen branch; raises when it leaves the Siegel space.

    The winding vector enters as an exact integer multiple of
    ``Delta_d eta_p`` added after the principal-branch term.
    """
    t = _check_point(model, t)
    branch = np.zeros(model.k, dtype=int) if branch is None else np.asarray(branch, dtype=int)
    z = model.Q(t)
    for p in range(model.k):
        z = z + (np.log(t[p]) / (2j * np.pi)) * model._log_coeffs[p]
    for p in range(model.k):
        if branch[p]:
            z = z + branch[p] * model._log_coeffs[p]
    check = siegel_check(z, tol)
    if not check.valid:
        raise DegenerateModelError("Z(t) is not in the Siegel space", location=f"t={_fmt_point(t)}",
                                   min_eigenvalue=check.min_im_eigenvalue)
    return z


def conjugate_jacobian(model, t, branch=None):
    """``G_ij = d w*_i / d t_j = sum_p Z_ip dw_p / dt_j``."""
    z = period_map_eval(model, t, branch)
    return z @ model.frame_jacobian(np.asarray(t, dtype=complex))


def base_metric_coeffs(model, t, branch=None):
    """Hermitian ``g_{i jbar}`` of the special Kähler metric in the ``dt`` frame.

    ``g_ij = (-i/4) sum_p (G_pi conj(W_pj) - W_pi conj(G_pj))`` with
    ``W = dw/dt`` and ``G = Z W``.
    """
    t = np.asarray(t, dtype=complex)
    wj = model.frame_jacobian(t)
    g_mat = conjugate_jacobian(model, t, branch)
    g = (-0.25j) * (g_mat.T @ np.conj(wj) - wj.T @ np.conj(g_mat))
    ev = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
    if ev[0] <= 0:
        raise ModelError("metric coefficients are not positive definite",
                         location=f"t={_fmt_point(t)}")
    return g


def min_im_eigenvalue(model, points, branch=None):
    """Smallest eigenvalue of ``Im Z`` over sample points (the lower bound ``lambda``)."""
    return min(siegel_check(period_map_eval(model, t, branch)).min_im_eigenvalue for t in points)


def log_bound(model, t, i, j):
    """``1 - eps(i) log|t_i| - eps(j) log|t_j|``."""
    t = np.asarray(t, dtype=complex)
    out = 1.0
    if model.epsilon(i):
        out -= np.log(abs(t[i]))
    if model.epsilon(j):
        out -= np.log(abs(t[j]))
    return out


def default_rays(model, angles=(0.0, 2.0, -2.5), base=0.3):
    """Rays along which each divisor coordinate, and then all of them, tend to zero.

    Each ray is ``(direction, start)``: the point at radius ``r`` is
    ``start + r * direction`` restricted to the moving coordinates.
    """
    rays = []
    subsets = [[p] for p in range(model.k)]
    if model.k > 1:
        subsets.append(list(range(model.k)))
    if model.k == 0:
        subsets.append([])
    for moving in subsets:
        for theta in angles:
            start = np.full(model.n, base * np.exp(0.7j), dtype=complex)
            direction = np.zeros(model.n, dtype=complex)
            for p in moving:
                start[p] = 0
                direction[p] = np.exp(1j * (theta + 0.3 * p))
            rays.append((direction, start))
    return rays


@dataclass(frozen=True)
class LogBoundFit:
    C: float
    d_exponent: float
    passed: bool
    violations: list
    branch_gap: float
    samples: int


def log_bound_fit(model, rays=None, radii=None, C_max=None, slope_tol=0.05):
    """Fit ``|g_ij| <= C (1 - eps(i) log|t_i| - eps(j) log|t_j|)`` along rays.

    ``C`` is the smallest constant valid on the samples and ``d_exponent``
    the growth exponent of ``max |g|`` in ``-log r`` on the innermost
    decade.  The fit passes when ``C`` is finite (and below ``C_max`` when
    given), the growth is at most linear, and ``g`` agrees on two branches.
    """
    rays = default_rays(model) if rays is None else rays
    radii = np.logspace(-1, -12, 45) if radii is None else np.asarray(radii, dtype=float)
    n = model.n
    C = 0.0
    violations = []
    branch_gap = 0.0
    exponents = []
    winding = np.ones(model.k, dtype=int)
    for r_idx, (direction, start) in enumerate(rays):
        peak = []
        for r in radii:
            t = start + r * direction
            g = base_metric_coeffs(model, t)
            if model.k:
                branch_gap = max(branch_gap, float(np.max(np.abs(g - base_metric_coeffs(model, t, winding)))))
            peak.append(float(np.max(np.abs(g))))
            for i in range(n):
                for j in range(n):
                    ratio = abs(g[i, j]) / log_bound(model, t, i, j)
                    if not np.isfinite(ratio):
                        violations.append({"ray": r_idx, "r": float(r), "entry": [i, j]})
                    else:
                        C = max(C, float(ratio))
        peak = np.array(peak)
        ell = -np.log(radii)
        tail = radii <= radii.min() * 10 ** (np.log10(radii.max() / radii.min()) / 3)
        if np.sum(tail) >= 2 and np.ptp(peak[tail]) > 1e-12 * peak[tail].max():
            slope = np.polyfit(np.log(ell[tail]), np.log(peak[tail]), 1)[0]
        else:
            slope = 0.0
        exponents.append(float(slope))
    d_exp = max(exponents) if exponents else 0.0
    passed = np.isfinite(C) and not violations and d_exp <= 1 + slope_tol and branch_gap <= 1e-12
    if C_max is not None and C > C_max:
        violations.append({"C": C, "C_max": C_max})
        passed = False
    return LogBoundFit(C, d_exp, bool(passed), violations, branch_gap,
                       len(rays) * len(radii))


def continuity_deviation(model, i, j, coord, base_point, radii=(1e-8, 1e-9, 1e-10, 1e-12),
                         limit_radius=1e-200, angle=0.4):
    """How far ``g_ij`` is from its limit as ``t_coord -> 0``.

    The limit is approximated at ``|t_coord| = limit_radius``, where any
    ``t log t`` contribution is far below double precision.
    """
    base_point = np.asarray(base_point, dtype=complex).copy()

    def at(r):
        p = base_point.copy()
        p[coord] = r * np.exp(1j * angle)
        return base_metric_coeffs(model, p)[i, j]

    limit = at(limit_radius)
    return max(abs(at(r) - limit) for r in radii), limit



def metric_coeffs_array(model, points):
    """Vectorized ``g_{i jbar}`` on an array of points ``(..., n)``, principal branch.

    No Siegel or positivity checks; used for dense mesh evaluation.
    """
    t = np.asarray(points, dtype=complex)
    z = model.Q(t)
    for p in range(model.k):
        z = z + (np.log(t[..., p]) / (2j * np.pi))[..., None, None] * model._log_coeffs[p]
    wj = model.frame_jacobian(t)
    g_mat = z @ wj
    return (-0.25j) * (np.swapaxes(g_mat, -1, -2) @ np.conj(wj) - np.swapaxes(wj, -1, -2) @ np.conj(g_mat))
