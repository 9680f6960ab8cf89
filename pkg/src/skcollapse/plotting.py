"""PNG figures for report series.

Figures use the Agg backend with fixed size, DPI and no embedded metadata
so repeated runs write the same bytes.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {"figure.figsize": (5.0, 3.6), "font.size": 9, "axes.grid": True, "grid.alpha": 0.3,
         "savefig.dpi": 120, "lines.linewidth": 1.2, "lines.markersize": 4}


def _col(series, name):
    idx = series["columns"].index(name)
    return np.array([float(r[idx]) for r in series["rows"]])


def _decay(ax, s):
    rho = _col(s, "rho")
    for col in s["columns"][2:]:
        ax.loglog(rho, _col(s, col), "o-", label=col.replace("product_", "").replace("beta", "beta="))
    ax.set_xlabel("rho")
    ax.set_ylabel("rho^(2n-2+beta) N(rho)")
    ax.invert_xaxis()
    ax.legend()


def _boundary(ax, s):
    rho = _col(s, "rho")
    ax.loglog(rho, _col(s, "diameter"), "o", label="mesh diameter")
    if "bound" in s["columns"]:
        ax.loglog(rho, _col(s, "bound"), "-", label="fitted C rho (-log rho)^d")
    ax.set_xlabel("rho")
    ax.set_ylabel("diameter of |w_j| = rho/2")
    ax.legend()


def _growth(ax, s):
    ax.plot(_col(s, "minus_log_t"), _col(s, "g_11"), "o-")
    ax.set_xlabel("-log|t|")
    ax.set_ylabel("g_11")


def _collapse(ax, s):
    t = _col(s, "t")
    ax.loglog(t, _col(s, "diam_t"), "o-", label="diam(t)")
    ax.loglog(t / 16, _col(s, "diam_t_over_16"), "s", label="diam(t/16)")
    ax.set_xlabel("t")
    ax.set_ylabel("fiber diameter")
    ax.legend()


def _residuals(ax, s):
    x = _col(s, s["columns"][0])
    for col in s["columns"][1:]:
        y = np.maximum(np.abs(_col(s, col)), 1e-18)
        ax.semilogy(np.arange(len(x)), y, ".", label=col)
    ax.set_xlabel("sample")
    ax.set_ylabel("residual")
    ax.legend(fontsize=7)


PLOTTERS = {"decay": _decay, "boundary_diameter": _boundary, "metric_growth": _growth,
            "fiber_collapse": _collapse, "darboux": _residuals, "t_duality": _residuals}


def render_figures(summary, out_dir, stem):
    """One PNG per plottable series; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(summary.get("series", {})):
        plotter = PLOTTERS.get(name)
        series = summary["series"][name]
        if plotter is None or not series["rows"]:
            continue
        with plt.rc_context(STYLE):
            fig, ax = plt.subplots()
            plotter(ax, series)
            ax.set_title(f"{summary['suite']}: {name.replace('_', ' ')}")
            fig.tight_layout()
            path = out_dir / f"{stem}_{name}.png"
            fig.savefig(path, format="png", metadata={"Software": None})
            plt.close(fig)
        written.append(path)
    return written
