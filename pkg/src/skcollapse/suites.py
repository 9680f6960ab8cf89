"""Verification suites: each is a pure function of model, parameters and seed.

A suite returns a :class:`Report` made of :class:`Record` entries.  Every
record names the operation that produced it, the inputs, the measured
value, the expected value or bound, the tolerance and a pass flag.
Tabular data for CSV files and figures goes into ``series``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import __version__
from .collapse import covering, mesh, metrics, paths
from .degeneration import (base_metric_coeffs,
                           continuity_deviation, log_bound_fit, min_im_eigenvalue,
                           reduce_to_unipotent, weight_filtration)
from .errors import SuiteError
from .rotation import RotationPoint, rotate, verify_darboux, volume_identity_ratio
from .semiflat import FibrationModel, dilation_identity_residual, fiber_geometry
from .special_kahler import (Prepotential, darboux_coordinates, double_legendre,
                             monge_ampere_residual, ricci_vs_weil_petersson)
from .symplectic import is_isotropic, same_span, symplectic_orthogonal
from .syz import (closedness_residual, dual_point, dual_polarization, dual_volume_density,
                  fiber_volume_product, t_duality_residual)

SUITES = ("special-kahler", "semiflat", "rotation", "degeneration", "collapse", "syz")

ACCEPTS = {
    "special-kahler": ("prepotential", "fibration"),
    "semiflat": ("prepotential", "fibration"),
    "rotation": ("prepotential", "fibration"),
    "syz": ("prepotential", "fibration"),
    "degeneration": ("degeneration", "monodromy", "monodromy_catalog"),
    "collapse": ("metric", "degeneration"),
}

DEFAULT_T = {"semiflat": (1.0, 0.25, 1e-4), "rotation": (1.0, 0.1, 0.01), "syz": (1.0, 0.01)}
DEFAULT_RHO = (0.1, 0.03, 0.01, 0.003, 0.001)


@dataclass
class Record:
    name: str
    provenance: str
    inputs: dict
    measured: object
    tolerance: float
    passed: bool
    expected: object = None
    bound: object = None
    note: str = None

    def to_json(self):
        out = {"name": self.name, "provenance": self.provenance, "inputs": self.inputs,
               "measured": self.measured, "tolerance": self.tolerance, "pass": bool(self.passed)}
        if self.expected is not None:
            out["expected"] = self.expected
        if self.bound is not None:
            out["bound"] = self.bound
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    suite: str
    model_name: str
    model_hash: str
    seed: int
    parameters: dict
    records: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    fitted: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    def add(self, name, provenance, inputs, measured, tolerance, passed, **kw):
        self.records.append(Record(name, provenance, inputs, measured, tolerance, bool(passed), **kw))

    def check_at_most(self, name, provenance, inputs, measured, tolerance, **kw):
        """Record ``measured <= tolerance``."""
        self.add(name, provenance, inputs, float(measured), tolerance,
                 bool(measured <= tolerance), bound=tolerance, **kw)

    def check_close(self, name, provenance, inputs, measured, expected, tolerance, relative=False, **kw):
        err = abs(measured - expected)
        if relative:
            err /= abs(expected)
        self.add(name, provenance, inputs, float(measured), tolerance, bool(err <= tolerance),
                 expected=float(expected), **kw)

    def to_json(self):
        return {"suite": self.suite, "model": self.model_name, "model_hash": self.model_hash,
                "seed": self.seed, "parameters": self.parameters,
                "records": [r.to_json() for r in self.records],
                "series": self.series, "fitted": self.fitted, "passed": self.passed,
                "environment": {"package_version": __version__,
                                "numpy": np.__version__}}


@dataclass
class ExperimentSpec:
    suite: str
    model: object
    t_sweep: tuple = None
    rho_sweep: tuple = None
    resolution: int = None
    tolerance: float = None
    seed: int = 0

    def __post_init__(self):
        if self.suite not in SUITES:
            raise SuiteError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.model.kind not in ACCEPTS[self.suite]:
            raise SuiteError(f"suite {self.suite!r} needs a model of kind "
                             f"{' or '.join(ACCEPTS[self.suite])}, got {self.model.kind!r}")
        for label, sweep in (("t", self.t_sweep), ("rho", self.rho_sweep)):
            if sweep is not None and len(sweep) == 0:
                raise SuiteError(f"the {label} sweep is empty")
        if self.t_sweep is not None and any(not t > 0 for t in self.t_sweep):
            raise SuiteError("t values must be positive")
        if self.rho_sweep is not None and any(not 0 < r < 1 for r in self.rho_sweep):
            raise SuiteError("rho values must lie in (0, 1)")


def _tol(spec, default):
    return default if spec.tolerance is None else float(spec.tolerance)


def _fibration(model):
    return model.value if isinstance(model.value, FibrationModel) else FibrationModel.from_prepotential(model.value)


def _prepotential(spec):
    fib = _fibration(spec.model)
    if fib.prepotential is None:
        raise SuiteError(f"suite {spec.suite!r} needs a prepotential; the model only has a period map")
    return fib, fib.prepotential


def _is_quadratic(F):
    return F.poly.degree <= 2


def _reference_quadratic(n):
    return Prepotential.from_terms(n, {tuple(2 if i == j else 0 for i in range(n)): 0.5j for j in range(n)})


def run_special_kahler(spec, report):
    fib, F = _prepotential(spec)
    rng = np.random.default_rng(spec.seed)
    n = F.n
    quadratic = _is_quadratic(F)
    pts = F.domain.sample(rng, 100, 0.05) if F.domain is not None else 1j + 0.1 * rng.standard_normal((100, n))
    ma = monge_ampere_residual(F, pts, 1e-4)
    report.check_at_most("monge_ampere_det", "special_kahler.monge_ampere_residual",
                         {"points": 100, "fd_step": 1e-4}, ma.max_residual,
                         _tol(spec, 1e-12 if quadratic else 1e-6))
    report.series["monge_ampere"] = {"columns": ["re_w", "im_w", "residual"] if n == 1 else
                                     ["sample", "residual"],
                                     "rows": [[float(p[0].real), float(p[0].imag), float(r)] if n == 1 else
                                              [k, float(r)] for k, (p, r) in enumerate(zip(pts, ma.residuals))]}
    d = fib.polarization.d
    worst = worst_scaled = 0.0
    gap = 0.0
    rows = []
    for w in pts[:20]:
        a = ricci_vs_weil_petersson(F, d, w)
        b = ricci_vs_weil_petersson(F, tuple(3 * x for x in d), w)
        worst = max(worst, a.residual)
        worst_scaled = max(worst_scaled, float(np.max(np.abs(a.wp - b.wp))))
        gap = max(gap, a.richardson_gap)
        rows.append([float(np.real(a.ricci[0, 0])), float(np.real(a.wp[0, 0])), a.residual])
    report.check_at_most("ricci_equals_weil_petersson", "special_kahler.ricci_vs_weil_petersson",
                         {"points": 20, "fd_step": 1e-3}, worst, _tol(spec, 0.0 if quadratic else 1e-8))
    report.check_at_most("weil_petersson_polarization_rescaling", "special_kahler.ricci_vs_weil_petersson",
                         {"d": list(d), "scaled_d": [3 * x for x in d]}, worst_scaled, 0.0)
    report.fitted["ricci_richardson_gap"] = gap
    report.series["ricci_wp"] = {"columns": ["ricci_11", "wp_11", "residual"], "rows": rows}
    err = 0.0
    for w in pts[:5]:
        y = darboux_coordinates(F, w)
        err = max(err, float(np.max(np.abs(double_legendre(F, y) - y))))
    report.check_at_most("double_legendre_identity", "special_kahler.double_legendre",
                         {"points": 5, "fd_step": 1e-5}, err, _tol(spec, 1e-6))


def run_semiflat(spec, report):
    fib = _fibration(spec.model)
    rng = np.random.default_rng(spec.seed)
    n = fib.n
    ts = spec.t_sweep or DEFAULT_T["semiflat"]
    if fib.domain is not None:
        ws = fib.domain.sample(rng, 1000, 0.05)
    else:
        ws = 1j + 0.1 * rng.standard_normal((1000, n))
    zs = rng.uniform(-1, 1, (1000, n)) + 1j * rng.uniform(-1, 1, (1000, n))
    samples = list(zip(ws, zs))
    for t in ts:
        if not t <= 1:
            continue
        r1, r2 = dilation_identity_residual(fib, t, samples)
        report.check_at_most("dilation_semiflat", "semiflat.dilation_identity_residual",
                             {"t": t, "samples": 1000}, r1, _tol(spec, 1e-12))
        report.check_at_most("dilation_family", "semiflat.dilation_identity_residual",
                             {"t": t, "samples": 1000}, r2, _tol(spec, 1e-12))
    w0 = fib.domain.center if fib.domain is not None else np.full(n, 1j)
    rows = []
    t_pair = [t for t in ts if t <= 1][:2] or [1.0]
    for t in t_pair:
        g1 = fiber_geometry(fib, w0, t, spec.resolution)
        g2 = fiber_geometry(fib, w0, t / 16, spec.resolution)
        ratio = g2.diameter / g1.diameter
        rows.append([t, g1.diameter, g2.diameter, ratio, g1.sf_volume])
        report.check_close("fiber_diameter_ratio", "semiflat.fiber_geometry",
                           {"t": t, "t_over": t / 16}, ratio, 0.5, 0.01, relative=True)
        expected_vol = t ** (n / 2) * fib.polarization.product
        report.check_close("fiber_volume", "semiflat.fiber_geometry", {"t": t},
                           g1.sf_volume, expected_vol, 1e-10, relative=True)
    report.series["fiber_collapse"] = {"columns": ["t", "diam_t", "diam_t_over_16", "ratio", "volume"],
                                       "rows": rows}


def _volume_calibration(n):
    ref = FibrationModel.from_prepotential(_reference_quadratic(n))
    w = np.full(n, 1j)
    z = np.full(n, 0.3 + 0.2j)
    return volume_identity_ratio(ref, [(w, z, 1.0)]).mean


def run_rotation(spec, report):
    fib, F = _prepotential(spec)
    rng = np.random.default_rng(spec.seed)
    n = F.n
    ts = spec.t_sweep or DEFAULT_T["rotation"]
    ws = F.domain.sample(rng, 4, 0.1) if F.domain is not None else 1j + 0.05 * rng.standard_normal((4, n))
    tol = _tol(spec, 1e-6)
    rows = []
    for t in ts:
        worst = {"canonical": 0.0, "holomorphy": 0.0, "modulus": 0.0, "jsq": 0.0}
        for w in ws:
            y = darboux_coordinates(F, w)
            x = rng.uniform(0, 1, 2 * n)
            chk = verify_darboux(fib, t, y, x)
            tri = rotate(RotationPoint(fib, y, x, t))
            worst["canonical"] = max(worst["canonical"], chk.canonical_residual)
            worst["holomorphy"] = max(worst["holomorphy"], chk.holomorphy_residual)
            worst["modulus"] = max(worst["modulus"], chk.modulus_residual)
            worst["jsq"] = max(worst["jsq"], float(np.max(np.abs(tri.J @ tri.J + np.eye(4 * n)))))
            rows.append([t, chk.canonical_residual, chk.holomorphy_residual,
                         chk.literal_antiholomorphy_residual, chk.expansion_residual, chk.modulus_residual])
        inputs = {"t": t, "points": len(ws)}
        report.check_at_most("darboux_canonical", "rotation.verify_darboux", inputs, worst["canonical"], tol)
        report.check_at_most("chi_holomorphy", "rotation.verify_darboux", inputs, worst["holomorphy"], tol)
        report.check_at_most("chi_modulus", "rotation.verify_darboux", inputs, worst["modulus"],
                             _tol(spec, 1e-12))
        report.check_at_most("J_squared", "rotation.rotate", inputs, worst["jsq"], 1e-8)
    report.series["darboux"] = {"columns": ["t", "canonical", "holomorphy", "literal_chi_antiholomorphy",
                                            "expansion", "modulus"], "rows": rows}
    calib = _volume_calibration(n)
    samples = []
    for w in (F.domain.sample(rng, 50, 0.05) if F.domain is not None else 1j + 0.05 * rng.standard_normal((50, n))):
        z = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
        samples.append((w, z, float(10 ** rng.uniform(-3, 0))))
    stats = volume_identity_ratio(fib, samples, calib)
    report.fitted["volume_calibration"] = calib
    report.check_at_most("volume_ratio_constant", "rotation.volume_identity_ratio",
                         {"samples": len(samples), "calibration": calib},
                         stats.max_relative_deviation, _tol(spec, 1e-8))


def run_syz(spec, report):
    fib, F = _prepotential(spec)
    rng = np.random.default_rng(spec.seed)
    n = F.n
    ts = spec.t_sweep or DEFAULT_T["syz"]
    ws = F.domain.sample(rng, 10, 0.1) if F.domain is not None else 1j + 0.05 * rng.standard_normal((10, n))
    quadratic = _is_quadratic(F)
    rows = []
    for t in ts:
        worst = worst_fd = 0.0
        for w in ws:
            y = darboux_coordinates(F, w)
            a = t_duality_residual(fib, y, t)
            b = t_duality_residual(fib, y, t, "fd")
            worst, worst_fd = max(worst, a), max(worst_fd, b)
            rows.append([t, a, b])
        report.check_at_most("t_duality", "syz.t_duality_residual", {"t": t, "points": len(ws)},
                             worst, _tol(spec, 1e-12 if quadratic else 1e-8))
        report.check_at_most("t_duality_fd_oracle", "syz.t_duality_residual",
                             {"t": t, "points": len(ws), "hessian": "fd"}, worst_fd, _tol(spec, 1e-8))
    report.series["t_duality"] = {"columns": ["t", "residual", "residual_fd"], "rows": rows}
    y = darboux_coordinates(F, ws[0])
    report.check_at_most("dual_form_closed", "syz.closedness_residual", {"fd_step": 1e-5},
                         closedness_residual(F, y), 1e-6)
    for t in ts:
        vp = fiber_volume_product(fib, y, t)
        report.check_close("volume_product", "syz.fiber_volume_product", {"t": t},
                           vp.product, vp.expected, 1e-10, relative=True)
        dens = dual_volume_density(dual_point(F, y, np.zeros(2 * n), t))
        report.check_close("dual_volume_density", "syz.dual_volume_density", {"t": t},
                           dens, t ** (-n), 1e-8, relative=True)
    report.fitted["dual_polarization"] = [str(f) for f in dual_polarization(fib.polarization.d)]


def _monodromy_checks(report, name, rep, expected):
    red = reduce_to_unipotent(rep)
    if expected:
        report.add("unipotent_order", "degeneration.reduce_to_unipotent", {"model": name},
                   list(red.orders), 0.0, list(red.orders) == list(expected), expected=list(expected))
    filt = weight_filtration(red.rep)
    exact = all(((g - g.eye(g.rows)) ** 2).is_zero_matrix for g in red.rep.generators)
    report.add("base_changed_square_zero", "degeneration.reduce_to_unipotent", {"model": name},
               int(exact), 0.0, exact, expected=1)
    ok = same_span(filt.W1, symplectic_orthogonal(rep.form, filt.W0))
    report.add("W1_is_W0_perp", "degeneration.weight_filtration", {"model": name},
               list(filt.dims), 0.0, ok, note="dims of (W0, W1)")
    report.add("W0_isotropic", "degeneration.weight_filtration", {"model": name},
               int(is_isotropic(rep.form, filt.W0)), 0.0, is_isotropic(rep.form, filt.W0), expected=1)


def run_degeneration(spec, report):
    m = spec.model
    if m.kind == "monodromy":
        _monodromy_checks(report, m.name, m.value, (m.extras or {}).get("expected_orders"))
        return
    if m.kind == "monodromy_catalog":
        for name, rep, expected in m.value:
            _monodromy_checks(report, name, rep, expected)
        return
    model = m.value
    fit = log_bound_fit(model)
    report.add("log_bound_fit", "degeneration.log_bound_fit", {"rays": "default", "samples": fit.samples},
               fit.C, 0.0, fit.passed, bound="finite", note=f"growth exponent {fit.d_exponent:.6f}")
    report.fitted["log_bound_C"] = fit.C
    report.fitted["log_bound_exponent"] = fit.d_exponent
    report.check_at_most("branch_independence", "degeneration.log_bound_fit", {"winding": 1},
                         fit.branch_gap, 1e-12)
    rng = np.random.default_rng(spec.seed)
    lam = min_im_eigenvalue(model, model.sample_points(rng, 32))
    report.add("siegel_lower_bound", "degeneration.min_im_eigenvalue", {"points": 32}, lam, 0.0, lam > 0,
               bound=0.0)
    rows = []
    closed_form = model.n == 1 and model.Q.degree == 0 and model.frame.degree <= 1
    for ell in np.linspace(0.5, 60, 24):
        t = np.exp(-ell) * np.exp(0.3j) * np.ones(model.n)
        g = base_metric_coeffs(model, t)
        rows.append([float(ell), float(g[0, 0].real)])
    report.series["metric_growth"] = {"columns": ["minus_log_t", "g_11"], "rows": rows}
    if closed_form and model.k == 1:
        q = float(model.Q(np.zeros(1))[0, 0].imag)
        eta = float(model._log_coeffs[0][0, 0])
        for ell in (2 * np.pi, 4 * np.pi):
            g = base_metric_coeffs(model, np.array([np.exp(-ell + 0.5j)]))[0, 0].real
            expected = 0.5 * (q + eta * ell / (2 * np.pi))
            report.check_close("metric_closed_form", "degeneration.base_metric_coeffs",
                               {"abs_t": f"exp(-{ell / np.pi:.0f}pi)"}, g, expected, _tol(spec, 1e-10))
    cont = (m.extras or {}).get("continuity")
    if cont:
        i, j = cont["entry"]
        dev, limit = continuity_deviation(model, i, j, cont["coord"], cont["base_point"])
        report.check_at_most("continuity_across_divisor", "degeneration.continuity_deviation",
                             {"entry": [i, j], "coord": cont["coord"]}, dev, _tol(spec, 1e-6))


def _collapse_metric(model):
    if model.kind == "metric":
        return model.value, model.extras["divisor"]
    metric = metrics.from_degeneration(model.value)
    return metric, covering.DivisorModel(metric.n, metric.divisor, metric.orders)


def run_collapse(spec, report):
    metric, divisor = _collapse_metric(spec.model)
    if not divisor.components:
        raise SuiteError("the collapse suite needs a model with a nonempty divisor")
    n = metric.n
    rhos = tuple(sorted(spec.rho_sweep or DEFAULT_RHO, reverse=True))
    # radial path into the first divisor component, others held off the divisor
    base = np.full(n, 0.3 * np.exp(0.7j))
    coord = divisor.components[0] if divisor.components else 0
    base[coord] = 0.0
    direction = np.zeros(n, dtype=complex)
    direction[coord] = 1.0
    rho0 = 0.1
    path = paths.radial(direction, 0.0, rho0, base)
    length = paths.path_length(metric, path)

    def speed(r):
        return float(metric.speed((base + r * direction)[None], direction[None])[0])

    oracle = quad(speed, 0.0, rho0, limit=400, epsabs=1e-14, epsrel=1e-12)[0]
    report.check_close("radial_length", "collapse.path_length", {"rho": rho0, "coord": coord},
                       length, oracle, _tol(spec, 1e-6), note="oracle: adaptive quadrature")

    # orbifold directions are measured on the uniformizing cover, where the bound is stated
    orbifold = any(m > 1 for m in divisor.orders)
    boundary_metric = metrics.pullback(metric, divisor.orders, divisor.components) if orbifold else metric
    diam_rows = []
    diams = []
    for rho in rhos:
        dia = mesh.boundary_diameter(boundary_metric, rho, spec.resolution)
        diams.append(dia)
        diam_rows.append([rho, dia])
    if len(rhos) >= 2:
        C, d = paths.fit_log_power(rhos, diams)
        report.fitted["boundary_C"] = C
        report.fitted["boundary_exponent"] = d
        report.add("boundary_diameter_exponent", "collapse.boundary_diameter",
                   {"rhos": list(rhos), "chart": "uniformizing cover" if orbifold else "base"},
                   d, 0.0, d <= 1.0, bound=1.0)
        for row in diam_rows:
            row.append(C * row[0] * (-np.log(row[0])) ** d)
    report.series["boundary_diameter"] = {"columns": ["rho", "diameter", "bound"][:len(diam_rows[0])],
                                          "rows": diam_rows}

    sweep = covering.covering_sweep(divisor, rhos)
    decay_rows = [[r.rho, r.count, r.products[0.1], r.products[0.5]] for r in sweep.reports]
    report.series["decay"] = {"columns": ["rho", "N", "product_beta0.1", "product_beta0.5"], "rows": decay_rows}
    for beta, ok in sweep.strictly_decreasing.items():
        report.add("covering_product_decreasing", "collapse.covering_sweep",
                   {"beta": beta, "rhos": list(rhos)}, [row[2 if beta == 0.1 else 3] for row in decay_rows],
                   0.0, ok)
    report.fitted["box_dimension"] = sweep.box_dimension
    report.add("box_dimension", "collapse.covering_sweep", {"rhos": list(rhos)}, sweep.box_dimension,
               0.05, sweep.box_dimension <= 2 * n - 2 + 0.05, bound=2 * n - 2)

    if n == 1:
        res = spec.resolution or 32
        coarse = mesh.polar_mesh(metric, 0.5, res // 2, 2 * res)
        fine = mesh.polar_mesh(metric, 0.5, res, 4 * res)
        d0, d1 = coarse.diameter(), fine.diameter()
        rel = abs(d1 - d0) / d1
        report.check_at_most("mesh_diameter_refinement", "collapse.mesh.diameter",
                             {"radius": 0.5, "coarse": [res // 2, 2 * res], "fine": [res, 4 * res]},
                             rel, 0.01)
        report.fitted["punctured_disc_diameter"] = d1
        dist = fine.distances_from([fine.size - 1])[0]
        report.series["mesh"] = {"columns": ["vertex", "re_w", "im_w", "distance_from_center"],
                                 "rows": [[k, float(p[0].real), float(p[0].imag), float(dist[k])]
                                          for k, p in enumerate(fine.points)]}
    if any(m > 1 for m in divisor.orders):
        pulled = metrics.pullback(metric)
        scan = [float(np.max(np.abs(pulled(np.where(np.arange(n) == coord, r, base)[None])[0])))
                for r in 10.0 ** -np.arange(1, 13)]
        ok = np.all(np.isfinite(scan)) and max(scan) <= 10 * scan[0] + 1
        report.add("pullback_bounded", "collapse.metrics.pullback", {"radii": "1e-1..1e-12"},
                   max(scan), 0.0, ok, note="coefficients of the uniformized metric on a shrinking scan")


RUNNERS = {"special-kahler": run_special_kahler, "semiflat": run_semiflat, "rotation": run_rotation,
           "syz": run_syz, "degeneration": run_degeneration, "collapse": run_collapse}


def run_suite(spec):
    """Run one suite; raises before producing any output when the inputs do not fit."""
    if spec.model.kind in ("prepotential", "fibration") and spec.suite in ("special-kahler", "rotation", "syz"):
        _prepotential(spec)
    params = {"t_sweep": list(spec.t_sweep) if spec.t_sweep else list(DEFAULT_T.get(spec.suite, ())),
              "rho_sweep": list(spec.rho_sweep or DEFAULT_RHO) if spec.suite == "collapse" else [],
              "resolution": spec.resolution, "tolerance": spec.tolerance}
    report = Report(spec.suite, spec.model.name, spec.model.hash, int(spec.seed), params)
    RUNNERS[spec.suite](spec, report)
    return report


__all__ = ["ExperimentSpec", "Record", "Report", "SUITES", "run_suite"]
