"""Fiber lattices of abelian varieties and flat-torus geometry.

The fiber over a base point is ``C^n / (Delta_d Z^n + Z Z^n)``.  In real
coordinates ``(Re z, Im z)`` the generators are the columns of
``[[Delta_d, Re Z], [0, Im Z]]``.
"""

import itertools

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError


def real_lattice_basis(z, d):
    """Columns generate the fiber lattice inside ``R^{2n}``."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    delta = np.diag(np.asarray(d, dtype=float))
    top = np.hstack([delta, z.real])
    bottom = np.hstack([np.zeros((n, n)), z.imag])
    return np.vstack([top, bottom])


def lattice_volume(basis):
    """Euclidean covolume ``|det B|``."""
    vol = abs(np.linalg.det(basis))
    if not np.isfinite(vol) or vol == 0.0:
        raise DomainError("fiber lattice is degenerate")
    return vol


def lll_reduce(basis, delta=0.99):
    """LLL-reduce the columns of a real basis matrix.

    Straightforward textbook version with Gram-Schmidt recomputed after
    each swap; the lattices here have rank at most eight.
    """
    b = np.array(basis, dtype=float).T.copy()
    m = len(b)

    def gram_schmidt(vectors):
        ortho = np.zeros_like(vectors)
        mu = np.zeros((m, m))
        for i in range(m):
            ortho[i] = vectors[i]
            for j in range(i):
                mu[i, j] = vectors[i] @ ortho[j] / (ortho[j] @ ortho[j])
                ortho[i] = ortho[i] - mu[i, j] * ortho[j]
        return ortho, mu

    ortho, mu = gram_schmidt(b)
    k = 1
    guard = 0
    while k < m:
        guard += 1
        if guard > 10000:
            raise DomainError("LLL reduction did not terminate")
        for j in range(k - 1, -1, -1):
            q = np.rint(mu[k, j])
            if q != 0:
                b[k] = b[k] - q * b[j]
                ortho, mu = gram_schmidt(b)
        lhs = ortho[k] @ ortho[k]
        rhs = (delta - mu[k, k - 1] ** 2) * (ortho[k - 1] @ ortho[k - 1])
        if lhs >= rhs:
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            ortho, mu = gram_schmidt(b)
            k = max(k - 1, 1)
    return b.T


def default_resolution(dim):
    return {1: 64, 2: 64, 3: 24, 4: 16}.get(dim, 8)


def flat_torus_diameter(basis, metric=None, resolution=None, refine=True):
    """Diameter of the flat torus ``R^m / B Z^m`` under a constant metric.

    The diameter equals the covering radius of the lattice.  The reduced
    fundamental cell is sampled on a ``resolution^m`` grid and, for each
    sample, distances to the ``3^m`` nearest translates are minimized.  The
    best samples are then polished with Nelder-Mead when ``refine`` is set.

    Returns
    -------
    diameter : float
    deep_point : ndarray
        Coordinates (in the reduced basis) of the farthest point found.
    """
    basis = np.asarray(basis, dtype=float)
    m = basis.shape[0]
    if metric is None:
        metric = np.eye(m)
    chol = np.linalg.cholesky(np.asarray(metric, dtype=float))
    reduced = lll_reduce(chol.T @ basis)
    if abs(np.linalg.det(reduced)) < 1e-300:
        raise DomainError("fiber lattice is degenerate")
    res = resolution or default_resolution(m)

    shifts = np.array(list(itertools.product((-1, 0, 1), repeat=m)), dtype=float)
    translates = shifts @ reduced.T

    def nearest(points):
        diff = points[:, None, :] - translates[None, :, :]
        return np.sqrt(np.min(np.einsum("pkm,pkm->pk", diff, diff), axis=1))

    axis = np.arange(res) / res - 0.5
    coords = np.array(list(itertools.product(axis, repeat=m)))
    best_val = -1.0
    best_coords = []
    for start in range(0, len(coords), 8192):
        chunk = coords[start:start + 8192]
        dist = nearest(chunk @ reduced.T)
        order = np.argsort(dist)[::-1][:4]
        for idx in order:
            best_coords.append((dist[idx], chunk[idx]))
        best_val = max(best_val, float(dist.max()))
    best_coords.sort(key=lambda item: -item[0])
    deep = best_coords[0][1]

    if refine:
        def objective(c):
            c = c - np.rint(c)
            return -float(nearest((c @ reduced.T)[None, :])[0])

        for _, start in best_coords[:4]:
            result = minimize(objective, start, method="Nelder-Mead",
                              options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
            if -result.fun > best_val:
                best_val = -result.fun
                deep = result.x - np.rint(result.x)
    return best_val, np.asarray(deep)
