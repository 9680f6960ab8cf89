"""Graph approximations of model metrics and their shortest-path distances.

A mesh is a regular grid in a real parameter space mapped into the
punctured polydisc by a chart.  Each vertex is joined to every neighbour
whose grid offset lies in ``{-1, 0, 1}^D`` (8-connected in each real
2-plane), and an edge gets the metric length of the parameter segment by a
short composite midpoint rule.  Distances are Dijkstra distances on that
graph, so they satisfy the triangle inequality exactly.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from ..errors import ConnectivityError, ResolutionError
from .paths import path_length, radial

EDGE_PANELS = 4


@dataclass
class MetricMesh:
    """Frozen weighted graph; queries are read-only.

    ``params`` are grid parameters per vertex, ``points`` their images.
    ``symmetric_sources`` lists vertices whose distance rows suffice for the
    diameter when the metric and grid share a transitive symmetry.
    """

    params: np.ndarray
    points: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    symmetric_sources: np.ndarray = None
    _graph: object = field(default=None, repr=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.lengths)) or np.any(self.lengths <= 0):
            bad = int(np.argmin(np.where(np.isfinite(self.lengths), self.lengths, -1.0)))
            raise ResolutionError(f"edge {tuple(self.edges[bad])} has non-positive or "
                                  "non-finite length; the mesh touches the divisor")
        v = len(self.points)
        g = coo_matrix((self.lengths, (self.edges[:, 0], self.edges[:, 1])), shape=(v, v)).tocsr()
        self._graph = g.maximum(g.T)

    @property
    def size(self):
        return len(self.points)

    def is_connected(self):
        return connected_components(self._graph, directed=False)[0] == 1

    def distances_from(self, sources):
        d = dijkstra(self._graph, directed=False, indices=np.atleast_1d(sources))
        if not np.all(np.isfinite(d)):
            raise ConnectivityError("some vertices are unreachable from the source")
        return d

    def distance(self, p, q):
        return float(self.distances_from([p])[0, q])

    def diameter(self, sources=None):
        """Largest graph distance, optionally restricted to rows from ``sources``."""
        if sources is None:
            sources = self.symmetric_sources
        if sources is None:
            sources = np.arange(self.size)
        return float(np.max(self.distances_from(sources)))

    def nearest(self, point):
        point = np.asarray(point, dtype=complex)
        return int(np.argmin(np.sum(np.abs(self.points - point) ** 2, axis=-1)))


def _neighbour_offsets(dim):
    offs = [o for o in itertools.product((-1, 0, 1), repeat=dim) if any(o)]
    # keep one of each +-pair
    return np.array([o for o in offs if next(c for c in o if c) > 0])


def build_mesh(metric, chart, axes, periodic=None, extra=None, symmetric_sources=None):
    """Mesh over the product grid ``axes`` (list of 1-d arrays of parameters).

    ``chart(params)`` maps ``(..., D)`` real parameters to ``(..., n)``
    complex points and must return ``(points, jacobian)`` with jacobian of
    shape ``(..., n, D)``.  Periodic axes wrap around with step equal to the
    grid spacing.  ``extra`` optionally returns additional
    ``(points, edges, lengths)`` appended after the grid vertices.
    """
    dim = len(axes)
    periodic = periodic or [False] * dim
    shape = tuple(len(a) for a in axes)
    grids = np.meshgrid(*axes, indexing="ij")
    params = np.stack([g.ravel() for g in grids], axis=-1)
    points, _ = chart(params)
    periods = [len(a) * (a[1] - a[0]) if p else None for a, p in zip(axes, periodic)]

    multi = np.stack(np.unravel_index(np.arange(params.shape[0]), shape), axis=-1)
    edges, lengths = [], []
    for off in _neighbour_offsets(dim):
        target = multi + off
        valid = np.ones(len(multi), dtype=bool)
        for k in range(dim):
            if periodic[k]:
                target[:, k] %= shape[k]
            else:
                valid &= (target[:, k] >= 0) & (target[:, k] < shape[k])
        src = np.nonzero(valid)[0]
        if src.size == 0:
            continue
        dst = np.ravel_multi_index(tuple(target[valid].T), shape)
        a = params[src]
        step = params[dst] - a
        for k in range(dim):
            if periodic[k]:
                step[:, k] = np.mod(step[:, k] + periods[k] / 2, periods[k]) - periods[k] / 2
        total = np.zeros(len(src))
        for j in range(EDGE_PANELS):
            mid = a + (j + 0.5) / EDGE_PANELS * step
            pts, jac = chart(mid)
            vel = np.einsum("...nd,...d->...n", jac, step)
            total += metric.speed(pts, vel) / EDGE_PANELS
        edges.append(np.stack([src, dst], axis=1))
        lengths.append(total)

    edges = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=int)
    lengths = np.concatenate(lengths) if lengths else np.zeros(0)
    if extra is not None:
        pts, e, ln = extra(points)
        points = np.concatenate([points, pts])
        params = np.concatenate([params, np.full((len(pts), dim), np.nan)])
        edges = np.concatenate([edges, e])
        lengths = np.concatenate([lengths, ln])
    mesh = MetricMesh(params, points, edges, lengths, symmetric_sources)
    if not mesh.is_connected():
        raise ConnectivityError("mesh graph is disconnected; increase the resolution")
    return mesh


def grid_mesh(metric, bounds, resolution):
    """Cartesian grid on real coordinates ``(Re w_1, Im w_1, Re w_2, ...)``.

    ``bounds`` is a list of ``(lo, hi)`` pairs, one per real coordinate.
    """
    n = metric.n
    if len(bounds) != 2 * n:
        raise ValueError(f"need {2 * n} real intervals, got {len(bounds)}")
    axes = [np.linspace(lo, hi, resolution + 1) for lo, hi in bounds]
    jac = np.zeros((n, 2 * n), dtype=complex)
    for j in range(n):
        jac[j, 2 * j] = 1.0
        jac[j, 2 * j + 1] = 1j

    def chart(p):
        pts = p[..., 0::2] + 1j * p[..., 1::2]
        return pts, np.broadcast_to(jac, p.shape[:-1] + jac.shape)

    return build_mesh(metric, chart, axes)


def polar_mesh(metric, radius, radial_steps, angular_steps, include_center=True):
    """Punctured disc ``0 < |w| <= radius`` (``n = 1``) in polar coordinates.

    The rings sit at ``r_k = radius k / radial_steps``.  With
    ``include_center`` one extra vertex for the puncture is joined to the
    innermost ring by edges whose length is the radial path length, so the
    graph approximates the metric completion.
    """
    if metric.n != 1:
        raise ValueError("polar_mesh is for one complex dimension")
    radii = radius * np.arange(1, radial_steps + 1) / radial_steps
    thetas = 2 * np.pi * np.arange(angular_steps) / angular_steps

    def chart(p):
        r, th = p[..., 0], p[..., 1]
        e = np.exp(1j * th)
        pts = (r * e)[..., None]
        jac = np.stack([e, 1j * r * e], axis=-1)[..., None, :]
        return pts, jac

    extra = None
    if include_center:
        r1 = radii[0]
        spoke = path_length(metric, radial(np.array([1.0]), 0.0, r1))

        def extra(points):
            centre = len(points)
            ring = np.arange(angular_steps)
            e = np.stack([np.full(angular_steps, centre), ring], axis=1)
            lens = np.empty(angular_steps)
            for k in range(angular_steps):
                if metric.rotation_invariant:
                    lens[k] = spoke
                else:
                    lens[k] = path_length(metric, radial(np.array([np.exp(1j * thetas[k])]), 0.0, r1))
            return np.zeros((1, 1), dtype=complex), e, lens

    sources = None
    if metric.rotation_invariant:
        sources = np.arange(radial_steps) * angular_steps
        if include_center:
            sources = np.append(sources, radial_steps * angular_steps)
    return build_mesh(metric, chart, [radii, thetas], [False, True], extra, sources)


def torus_mesh(metric, radii, angular_steps):
    """Torus ``|w_j| = radii[j]`` parameterized by angles, periodic in each."""
    radii = np.asarray(radii, dtype=float)
    n = len(radii)
    thetas = 2 * np.pi * np.arange(angular_steps) / angular_steps

    def chart(p):
        e = np.exp(1j * p)
        pts = radii * e
        jac = np.zeros(p.shape[:-1] + (n, n), dtype=complex)
        for j in range(n):
            jac[..., j, j] = 1j * radii[j] * e[..., j]
        return pts, jac

    sources = np.array([0]) if metric.rotation_invariant else None
    return build_mesh(metric, chart, [thetas] * n, [True] * n, None, sources)


def default_angular_steps(n):
    return {1: 256, 2: 64}.get(n, 16)


def boundary_diameter(metric, rho, resolution=None):
    """Graph diameter of the distinguished boundary ``{|w_j| = rho/2}``."""
    if not 0 < rho < 2:
        raise ValueError("rho must lie in (0, 2)")
    steps = resolution or default_angular_steps(metric.n)
    mesh = torus_mesh(metric, np.full(metric.n, rho / 2), steps)
    return mesh.diameter()
