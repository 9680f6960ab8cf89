"""Central finite-difference stencils on real and complex arguments."""

import numpy as np


def gradient(f, x, step):
    """Central-difference gradient of a scalar function on ``R^m``."""
    x = np.asarray(x, dtype=float)
    g = np.empty(x.size)
    for k in range(x.size):
        e = np.zeros_like(x)
        e.flat[k] = step
        g[k] = (f(x + e) - f(x - e)) / (2 * step)
    return g


def jacobian(f, x, step):
    """Central-difference Jacobian; column ``k`` is ``df/dx_k``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e.flat[k] = step
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * step))
    return np.stack(cols, axis=-1)


def directional(f, x, v, step):
    """Central difference of ``f`` along the vector ``v``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return (np.asarray(f(x + step * v)) - np.asarray(f(x - step * v))) / (2 * step)


def hessian(f, x, step):
    """Symmetric central-difference Hessian of a scalar function on ``R^m``."""
    x = np.asarray(x, dtype=float)
    m = x.size
    f0 = f(x)
    h = np.empty((m, m))
    basis = np.eye(m) * step
    for i in range(m):
        ei = basis[i].reshape(x.shape)
        h[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / step**2
        for j in range(i + 1, m):
            ej = basis[j].reshape(x.shape)
            val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * step**2)
            h[i, j] = h[j, i] = val
    return h


def complex_hessian(f, w, step):
    """``d^2 f / dw_i d(conj w_j)`` of a real function of ``w`` in ``C^n``.

    Uses the real Hessian in ``(u, v) = (Re w, Im w)`` and the identity
    ``4 d_i dbar_j = f_{u_i u_j} + f_{v_i v_j} + i (f_{u_i v_j} - f_{v_i u_j})``.
    """
    w = np.asarray(w, dtype=complex)
    n = w.size

    def real_f(x):
        return f(x[:n] + 1j * x[n:])

    h = hessian(real_f, np.concatenate([w.real, w.imag]), step)
    uu, uv = h[:n, :n], h[:n, n:]
    vu, vv = h[n:, :n], h[n:, n:]
    return 0.25 * (uu + vv + 1j * (uv - vu))
