import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from skcollapse.collapse import (DivisorModel, MetricMesh, ModelMetric, arc, boundary_diameter, concatenate,
                                 covering_report, covering_sweep, euclidean, fit_log_power,
                                 from_degeneration, grid_mesh, orbifold, path_length, polar_mesh,
                                 pullback, radial, segment, uniformize)
from skcollapse.collapse.covering import disc_band_cover
from skcollapse.errors import ConnectivityError, InputError, ResolutionError, SingularPathError


@pytest.fixture(scope="module")
def log_metric(models):
    return from_degeneration(models("log1d").value)


def test_uniformize_examples():
    w = np.array([0.5 + 0.1j, -0.3j])
    np.testing.assert_array_equal(uniformize((1, 1), w), w)
    assert uniformize((2,), np.array([0.5]))[0] == 0.25
    assert uniformize((3,), np.array([0.1j, 2.0]))[1] == 2.0


def test_radial_length_log_model(log_metric):
    rho = 0.1
    oracle = quad(lambda r: np.sqrt(1 - np.log(r) / (2 * np.pi)), 0, rho, epsabs=1e-14, epsrel=1e-12,
                  limit=200)[0]
    length = path_length(log_metric, radial(np.array([1.0]), 0.0, rho))
    assert abs(length - oracle) <= 1e-6


def test_radial_length_orbifold_closed_form():
    for rho in (0.5, 0.1, 0.01):
        length = path_length(orbifold(1, (2,)), radial(np.array([1.0]), 0.0, rho))
        assert length == pytest.approx(2 * np.sqrt(rho), rel=1e-6)


def test_non_integrable_endpoint_is_rejected():
    inverse = ModelMetric(1, lambda p: (np.abs(p) ** -2.0)[..., None], divisor=(0,))
    with pytest.raises(SingularPathError):
        path_length(inverse, radial(np.array([1.0]), 0.0, 0.5))


def test_boundary_circle_euclidean():
    for rho in (0.1, 0.01):
        assert boundary_diameter(euclidean(1), rho) == pytest.approx(np.pi * rho / 2, rel=0.02)


def test_boundary_circle_log_model(log_metric):
    for rho in (0.1, 0.001):
        expected = np.pi * (rho / 2) * np.sqrt(1 - np.log(rho / 2) / (2 * np.pi))
        assert boundary_diameter(log_metric, rho) == pytest.approx(expected, rel=0.03)


def test_boundary_diameter_log_bound(log_metric):
    rhos = (0.1, 0.03, 0.01, 0.003, 0.001)
    C, d = fit_log_power(rhos, [boundary_diameter(log_metric, r) for r in rhos])
    assert d <= 1.0 and np.isfinite(C)


def test_fit_log_power_recovers_exponent():
    rhos = np.array([0.1, 0.01, 0.001, 1e-4])
    C, d = fit_log_power(rhos, 2.5 * rhos * (-np.log(rhos)) ** 0.7)
    assert d == pytest.approx(0.7, abs=1e-12) and C == pytest.approx(2.5, rel=1e-12)


def test_square_diagonal():
    m = grid_mesh(euclidean(1), [(0, 1), (0, 1)], 128)
    p, q = m.nearest(0j), m.nearest(1 + 1j)
    assert m.distance(p, q) == pytest.approx(np.sqrt(2), rel=0.02)


def test_punctured_disc_refinement(log_metric):
    coarse = polar_mesh(log_metric, 0.5, 16, 64).diameter()
    fine = polar_mesh(log_metric, 0.5, 32, 128).diameter()
    assert abs(fine - coarse) / fine <= 0.01


def test_degenerate_metric_is_rejected():
    flat_spot = ModelMetric(1, lambda p: np.where(np.abs(p[..., 0]) < 0.3, 0.0, 1.0)[..., None, None] + 0j)
    with pytest.raises(ResolutionError):
        grid_mesh(flat_spot, [(-1, 1), (-1, 1)], 8)


def test_unreachable_vertex_is_reported():
    pts = np.array([[0j], [1 + 0j], [5 + 0j], [6 + 0j]])
    m = MetricMesh(np.zeros((4, 2)), pts, np.array([[0, 1], [2, 3]]), np.ones(2))
    assert not m.is_connected()
    with pytest.raises(ConnectivityError):
        m.distance(0, 3)


def test_point_divisor_covering():
    divisor = DivisorModel(1, (0,), (1,))
    for rho in (0.1, 0.01, 0.001):
        rep = covering_report(divisor, rho)
        assert rep.count == 1
        assert rep.products[0.1] == pytest.approx(rho ** 0.1)


def _band_squares(rho):
    """Explicit squares of the greedy band cover, for a coverage oracle."""
    side = rho * np.sqrt(2.0)
    out = []
    for k in range(int(np.ceil(2.0 / side))):
        lo = -1.0 + side * k
        hi = min(lo + side, 1.0)
        closest = 0.0 if lo <= 0 <= hi else min(abs(lo), abs(hi))
        half = np.sqrt(max(1 - closest ** 2, 0.0))
        count = int(np.ceil(2 * half / side))
        for j in range(count):
            out.append((lo, -half + j * side, side))
    return out


@pytest.mark.parametrize("rho", [0.3, 0.1, 0.05])
def test_band_cover_covers_the_disc(rho):
    squares = _band_squares(rho)
    assert len(squares) == disc_band_cover(rho)
    rng = np.random.default_rng(9)
    r = np.sqrt(rng.uniform(0, 1, 4000))
    th = rng.uniform(0, 2 * np.pi, 4000)
    x, y = r * np.cos(th), r * np.sin(th)
    sq = np.array(squares)
    inside = ((x[:, None] >= sq[:, 0]) & (x[:, None] <= sq[:, 0] + sq[:, 2])
              & (y[:, None] >= sq[:, 1]) & (y[:, None] <= sq[:, 1] + sq[:, 2]))
    assert inside.any(axis=1).all()
    # every square has diameter 2 rho, so the count must beat the area bound
    assert len(squares) >= np.pi / (2 * rho ** 2)


def test_line_divisor_covering_scales_like_rho_squared():
    sweep = covering_sweep(DivisorModel(2, (0,), (1,)))
    assert all(sweep.strictly_decreasing.values())
    counts = np.array([r.count for r in sweep.reports])
    rhos = np.array([r.rho for r in sweep.reports])
    # squares of area 2 rho^2 tile the disc in the limit, so 2 rho^2 N -> pi
    assert 2 * rhos[-1] ** 2 * counts[-1] == pytest.approx(np.pi, rel=0.01)
    assert np.all(np.diff(counts * rhos ** 2) < 0)
    assert sweep.box_dimension == pytest.approx(2.0, abs=0.05)


def test_crossing_divisor_strata():
    rep = covering_report(DivisorModel(2, (0, 1), (2, 3)), 0.1)
    counts = [s.count for s in rep.strata]
    assert counts[0] == 1 and counts[1] == counts[2] == disc_band_cover(0.1)
    assert dict(rep.strata[0].normal_radii) == pytest.approx({0: 0.01, 1: 0.001})


def test_divisor_model_validation():
    with pytest.raises(InputError):
        DivisorModel(2, (0, 0), (1, 1))
    with pytest.raises(InputError):
        DivisorModel(2, (3,), (1,))


def test_pullback_of_orbifold_is_bounded():
    m = pullback(orbifold(1, (2,)))
    vals = [m(np.array([[r]]))[0, 0, 0].real for r in 10.0 ** -np.arange(1, 13)]
    np.testing.assert_allclose(vals, 4.0, rtol=1e-12)
    assert pullback(euclidean(1), (2,))(np.array([[0.5]]))[0, 0, 0].real == pytest.approx(1.0)


# --- properties -----------------------------------------------------------

@settings(max_examples=25)
@given(st.floats(0.05, 0.5), st.floats(0, 2 * np.pi), st.floats(0.05, 0.5), st.floats(0, 2 * np.pi))
def test_path_length_additive(r1, t1, r2, t2):
    metric = orbifold(1, (3,))
    a = np.array([r1 * np.exp(1j * t1)])
    b = np.array([r2 * np.exp(1j * t2)])
    c = 0.5 * (a + b) + 0.2j
    whole = path_length(metric, concatenate(segment(a, c), segment(c, b)))
    parts = path_length(metric, segment(a, c)) + path_length(metric, segment(c, b))
    assert whole == pytest.approx(parts, rel=1e-8)


@settings(max_examples=25)
@given(st.floats(0.01, 0.9), st.floats(0.5, 3.0))
def test_path_length_reparameterization_invariant(rho, power):
    metric = orbifold(1, (2,))
    base = radial(np.array([np.exp(0.3j)]), 0.0, rho)
    moved = base.reparameterized(lambda s: np.asarray(s) ** power,
                                 lambda s: power * np.asarray(s) ** (power - 1))
    assert path_length(metric, moved) == pytest.approx(path_length(metric, base), rel=1e-6)


@settings(max_examples=25)
@given(st.floats(0.05, 1.0), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_arc_lengths_reversible(radius, t0, t1):
    metric = euclidean(1)
    path = arc(radius, t0, t1, 0, np.zeros(1))
    length = path_length(metric, path)
    assert length == pytest.approx(radius * abs(t1 - t0), rel=1e-10, abs=1e-14)
    assert path_length(metric, path.reversed()) == pytest.approx(length, rel=1e-12, abs=1e-14)


_MESH = {}


def _mesh():
    if not _MESH:
        _MESH["m"] = polar_mesh(orbifold(1, (2,)), 0.5, 8, 24)
    return _MESH["m"]


@settings(max_examples=50)
@given(st.data())
def test_mesh_distance_is_a_metric(data):
    m = _mesh()
    i, j, k = (data.draw(st.integers(0, m.size - 1)) for _ in range(3))
    d = m.distances_from([i, j])
    # graph distances are exact up to the order of floating additions
    assert d[0, j] == pytest.approx(d[1, i], rel=1e-13)
    assert d[0, k] <= (d[0, j] + d[1, k]) * (1 + 1e-13)


@settings(max_examples=20)
@given(st.integers(2, 6), st.floats(1e-12, 0.5), st.floats(0, 2 * np.pi))
def test_pullback_coefficients_bounded(m, r, theta):
    pulled = pullback(orbifold(2, (m,), (0,)))
    h = pulled(np.array([[r * np.exp(1j * theta), 0.3]]))[0]
    assert np.all(np.isfinite(h))
    assert abs(h[0, 0]) == pytest.approx(m ** 2, rel=1e-9)
