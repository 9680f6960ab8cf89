"""Parameterized curves and their lengths under a model metric."""

from dataclasses import dataclass

import numpy as np

from ..errors import SingularPathError

EPS_MIN = 1e-12


@dataclass(frozen=True)
class Path:
    """Curve ``s -> position(s)`` on ``[0, 1]`` with its velocity.

    ``singular_start`` / ``singular_end`` mark endpoints on the divisor
    where the integrand may blow up.
    """

    position: object
    velocity: object
    singular_start: bool = False
    singular_end: bool = False

    def reversed(self):
        return Path(lambda s: self.position(1 - s), lambda s: -self.velocity(1 - s),
                    self.singular_end, self.singular_start)

    def reparameterized(self, phi, dphi):
        """``s -> gamma(phi(s))`` for an increasing ``phi`` of ``[0, 1]`` onto itself."""
        return Path(lambda s: self.position(phi(s)),
                    lambda s: self.velocity(phi(s)) * np.asarray(dphi(s))[..., None],
                    self.singular_start, self.singular_end)


def segment(a, b, singular_start=False, singular_end=False):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return Path(lambda s: a + np.asarray(s)[..., None] * (b - a),
                lambda s: np.broadcast_to(b - a, np.shape(s) + a.shape),
                singular_start, singular_end)


def radial(direction, r0, r1, base=None):
    """``base + r(s) * direction`` with ``r`` running linearly from ``r0`` to ``r1``."""
    direction = np.asarray(direction, dtype=complex)
    base = np.zeros_like(direction) if base is None else np.asarray(base, dtype=complex)
    return Path(lambda s: base + (r0 + np.asarray(s)[..., None] * (r1 - r0)) * direction,
                lambda s: np.broadcast_to((r1 - r0) * direction, np.shape(s) + direction.shape),
                singular_start=(r0 == 0), singular_end=(r1 == 0))


def arc(radius, theta0, theta1, coord, base):
    """Circle arc in coordinate ``coord`` with the others held at ``base``."""
    base = np.asarray(base, dtype=complex)

    def position(s):
        s = np.asarray(s)
        p = np.broadcast_to(base, s.shape + base.shape).copy()
        p[..., coord] = radius * np.exp(1j * (theta0 + s * (theta1 - theta0)))
        return p

    def velocity(s):
        s = np.asarray(s)
        v = np.zeros(s.shape + base.shape, dtype=complex)
        v[..., coord] = 1j * (theta1 - theta0) * radius * np.exp(1j * (theta0 + s * (theta1 - theta0)))
        return v

    return Path(position, velocity)


def concatenate(first, second):
    """Run ``first`` on ``[0, 1/2]`` and ``second`` on ``[1/2, 1]``."""

    def pick(f, g, s, scale):
        s = np.asarray(s, dtype=float)
        lo = s < 0.5
        out_lo = f(np.where(lo, 2 * s, 0.0))
        out_hi = g(np.where(lo, 0.0, 2 * s - 1))
        return scale * np.where(lo[..., None], out_lo, out_hi)

    return Path(lambda s: pick(first.position, second.position, s, 1.0),
                lambda s: pick(first.velocity, second.velocity, s, 2.0),
                first.singular_start, second.singular_end)


def _midpoint(integrand, a, b, steps):
    h = (b - a) / steps
    s = a + (np.arange(steps) + 0.5) * h
    return float(np.sum(integrand(s)) * h)


def _graded(integrand, steps, eps):
    """``int_0^1/2`` with log-spaced panels on ``[eps, 1/2]`` and a power-law tail on ``[0, eps]``."""
    lo, hi = np.log(eps), np.log(0.5)
    h = (hi - lo) / steps
    tau = lo + (np.arange(steps) + 0.5) * h
    s = np.exp(tau)
    body = float(np.sum(integrand(s) * s) * h)
    f1, f2 = integrand(np.array([eps, eps / 10]))
    if not (np.isfinite(f1) and np.isfinite(f2)) or f1 <= 0 or f2 <= 0:
        alpha = 0.0 if f1 == f2 else -np.inf
    else:
        alpha = np.log(f1 / f2) / np.log(10.0)
    if alpha <= -1 + 1e-3:
        raise SingularPathError(f"integrand grows like s^{alpha:.3f} at a singular endpoint; "
                                "the length diverges")
    return body + eps * f1 / (1 + alpha)


def path_length(metric, path, steps=4096, eps_min=EPS_MIN, check=True):
    """Length of ``path`` by composite midpoint quadrature.

    Regular curves use ``steps`` uniform panels.  A singular endpoint
    switches that half of the curve to log-graded panels starting at
    ``eps_min``, plus a power-law extrapolation of the remaining tail.
    The rule is repeated at half resolution; the two results are combined
    by Richardson extrapolation (the midpoint error is quadratic in the
    panel width) and, with ``check``, a :class:`SingularPathError` is raised
    when they disagree by more than the expected discretization error.
    """

    def speed(s):
        s = np.asarray(s, dtype=float)
        return metric.speed(path.position(s), path.velocity(s))

    def evaluate(m):
        if not (path.singular_start or path.singular_end):
            return _midpoint(speed, 0.0, 1.0, m)
        total = 0.0
        if path.singular_start:
            total += _graded(speed, m // 2, eps_min)
        else:
            total += _midpoint(speed, 0.0, 0.5, m // 2)
        if path.singular_end:
            total += _graded(lambda s: speed(1.0 - s), m // 2, eps_min)
        else:
            total += _midpoint(speed, 0.5, 1.0, m // 2)
        return total

    fine = evaluate(steps)
    if not np.isfinite(fine):
        raise SingularPathError("path length is not finite")
    coarse = evaluate(steps // 2)
    if check and abs(fine - coarse) > 1e-3 * max(abs(fine), 1e-300):
        raise SingularPathError("quadrature does not converge under refinement "
                                f"({coarse:.6g} vs {fine:.6g})")
    return (4.0 * fine - coarse) / 3.0


def fit_log_power(rhos, values):
    """Fit ``value ~ C rho (-log rho)^d``.

    ``d`` is the regression slope of ``log(value / rho)`` against
    ``log(-log rho)``; ``C`` is the smallest constant that makes the bound
    hold at every sample for that ``d``.
    """
    rhos = np.asarray(rhos, dtype=float)
    values = np.asarray(values, dtype=float)
    ell = -np.log(rhos)
    if np.ptp(np.log(ell)) == 0:
        d = 0.0
    else:
        d = float(np.polyfit(np.log(ell), np.log(values / rhos), 1)[0])
    C = float(np.max(values / (rhos * ell ** d)))
    return C, d
