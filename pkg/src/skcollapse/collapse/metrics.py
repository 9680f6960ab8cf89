"""Model metrics on a punctured polydisc and the uniformizing map.

A :class:`ModelMetric` returns, at each point ``w``, the Hermitian matrix
``H`` with squared length ``xi^H H xi`` for a tangent vector ``xi``.  With
this normalization the Euclidean metric is the identity and the orbifold
model ``sum |w_i|^{-2(1-1/m_i)} dw_i d(conj w_i)`` is diagonal.
"""

import numpy as np

from ..degeneration import metric_coeffs_array


class ModelMetric:
    """Positive-definite Hermitian metric, singular at most on the divisor.

    Parameters
    ----------
    n : int
    evaluate : callable
        Maps points ``(..., n)`` to matrices ``(..., n, n)``.
    divisor : sequence of int
        Coordinates ``j`` whose hyperplanes ``w_j = 0`` form the divisor.
    orders : sequence of int
        Orbifold orders, one per divisor coordinate.
    rotation_invariant : bool
        Whether ``H`` depends only on ``|w_j|``; meshes use it to pick
        representative sources for diameters.
    """

    def __init__(self, n, evaluate, divisor=(), orders=None, rotation_invariant=False, name="metric"):
        self.n = int(n)
        self._evaluate = evaluate
        self.divisor = tuple(int(j) for j in divisor)
        self.orders = tuple(orders) if orders is not None else (1,) * len(self.divisor)
        self.rotation_invariant = rotation_invariant
        self.name = name

    def __call__(self, points):
        points = np.asarray(points, dtype=complex)
        return self._evaluate(points)

    def speed(self, points, velocities):
        """``sqrt(xi^H H xi)`` evaluated pointwise."""
        h = self(points)
        v = np.asarray(velocities, dtype=complex)
        q = np.einsum("...i,...ij,...j->...", np.conj(v), h, v).real
        return np.sqrt(np.maximum(q, 0.0))


def euclidean(n):
    def evaluate(points):
        return np.broadcast_to(np.eye(n, dtype=complex), points.shape[:-1] + (n, n))

    return ModelMetric(n, evaluate, rotation_invariant=True, name="euclidean")


def orbifold(n, orders, divisor=None):
    """``|w_j|^{-2(1-1/m_j)}`` on divisor directions, Euclidean elsewhere."""
    orders = tuple(int(m) for m in orders)
    divisor = tuple(range(len(orders))) if divisor is None else tuple(divisor)
    exps = np.zeros(n)
    for j, m in zip(divisor, orders):
        exps[j] = -2.0 * (1.0 - 1.0 / m)

    def evaluate(points):
        with np.errstate(divide="ignore"):
            diag = np.abs(points) ** exps
        out = np.zeros(points.shape + (n,), dtype=complex)
        idx = np.arange(n)
        out[..., idx, idx] = diag
        return out

    return ModelMetric(n, evaluate, divisor, orders, rotation_invariant=True, name="orbifold")


def from_degeneration(model):
    """Riemannian metric ``2 g`` of a nilpotent-orbit model in the ``dt`` frame."""

    def evaluate(points):
        return 2.0 * metric_coeffs_array(model, points)

    invariant = model.Q.degree == 0 and model.frame.degree <= 1
    return ModelMetric(model.n, evaluate, tuple(range(model.k)), model.orbifold_orders,
                       rotation_invariant=invariant, name="degeneration")


def log_weighted(metric, power):
    """Multiply by ``(1 - sum_{j in divisor} log|w_j|)^power``."""
    div = list(metric.divisor)

    def evaluate(points):
        with np.errstate(divide="ignore"):
            weight = 1.0 - np.sum(np.log(np.abs(points[..., div])), axis=-1) if div else np.ones(points.shape[:-1])
        return metric(points) * (weight ** power)[..., None, None]

    return ModelMetric(metric.n, evaluate, metric.divisor, metric.orders,
                       metric.rotation_invariant, f"{metric.name}*log^{power}")


def uniformize(orders, point, divisor=None):
    """``q(w) = (w_1^m_1, ..., w_k^m_k, w_{k+1}, ...)``."""
    point = np.asarray(point, dtype=complex)
    orders = tuple(int(m) for m in orders)
    divisor = tuple(range(len(orders))) if divisor is None else tuple(divisor)
    out = point.copy()
    for j, m in zip(divisor, orders):
        out[..., j] = point[..., j] ** m
    return out


def uniformizing_jacobian(orders, point, divisor=None):
    point = np.asarray(point, dtype=complex)
    n = point.shape[-1]
    orders = tuple(int(m) for m in orders)
    divisor = tuple(range(len(orders))) if divisor is None else tuple(divisor)
    diag = np.ones(point.shape, dtype=complex)
    for j, m in zip(divisor, orders):
        diag[..., j] = m * point[..., j] ** (m - 1)
    out = np.zeros(point.shape + (n,), dtype=complex)
    idx = np.arange(n)
    out[..., idx, idx] = diag
    return out


def pullback(metric, orders=None, divisor=None):
    """``q^* H = J^H H(q(w)) J`` by Jacobian congruence.

    Without a divisor on ``metric`` the first ``len(orders)`` coordinates are used.
    """
    orders = metric.orders if orders is None else tuple(orders)
    if divisor is None:
        divisor = metric.divisor or tuple(range(len(orders)))

    def evaluate(points):
        jac = uniformizing_jacobian(orders, points, divisor)
        h = metric(uniformize(orders, points, divisor))
        return np.conj(np.swapaxes(jac, -1, -2)) @ h @ jac

    return ModelMetric(metric.n, evaluate, divisor, (1,) * len(divisor),
                       metric.rotation_invariant, f"q*{metric.name}")
