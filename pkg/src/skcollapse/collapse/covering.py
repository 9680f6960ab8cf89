"""Box coverings of a normal-crossings divisor in the unit polydisc.

The divisor is a union of coordinate hyperplanes ``{w_j = 0}``.  Each
stratum (an intersection of components, minus nothing) is covered by
polydiscs centred on it: radius ``rho^{m_j}`` in the normal direction of
every component through the stratum and radius ``rho`` along the free
coordinates.  Along the free coordinates the unit disc is covered greedily
by squares of side ``rho sqrt 2`` (each inscribed in a disc of radius
``rho``), one horizontal band at a time.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, ResolutionError

DEFAULT_BETAS = (0.1, 0.5)
STANDARD_SWEEP = (0.1, 0.03, 0.01, 0.003, 0.001)
COUNT_CAP = 10 ** 15


@dataclass(frozen=True)
class DivisorModel:
    """``components[i]`` is the coordinate index of the i-th hyperplane."""

    n: int
    components: tuple
    orders: tuple

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        orders = tuple(int(m) for m in self.orders) if self.orders else (1,) * len(comps)
        if len(set(comps)) != len(comps) or any(not 0 <= c < self.n for c in comps):
            raise InputError(f"divisor components {comps} must be distinct coordinates below n={self.n}",
                             "components")
        if len(orders) != len(comps) or any(m < 1 for m in orders):
            raise InputError("one positive orbifold order per component is required", "orders")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "orders", orders)

    @classmethod
    def from_json(cls, data):
        return cls(int(data["n"]), tuple(data.get("components", ())), tuple(data.get("orders", ())))

    def to_json(self):
        return {"n": self.n, "components": list(self.components), "orders": list(self.orders)}

    def strata(self):
        """Nonempty component subsets, deepest first."""
        k = len(self.components)
        out = []
        for size in range(k, 0, -1):
            out.extend(itertools.combinations(range(k), size))
        return out


def disc_band_cover(rho):
    """Greedy count of squares of side ``rho sqrt 2`` covering the closed unit disc."""
    side = rho * np.sqrt(2.0)
    bands = int(np.ceil(2.0 / side))
    if bands > 10 ** 8:
        raise ResolutionError(f"rho={rho} needs {bands} bands; greedy covering does not terminate")
    lo = -1.0 + side * np.arange(bands)
    hi = np.minimum(lo + side, 1.0)
    closest = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    half_width = np.sqrt(np.maximum(1.0 - closest ** 2, 0.0))
    return int(np.sum(np.ceil(2.0 * half_width / side)))


@dataclass(frozen=True)
class StratumCover:
    components: tuple
    free_coordinates: tuple
    normal_radii: tuple
    count: int

    def describe(self):
        normal = ", ".join(f"|w_{j + 1}| < {r:.3e}" for j, r in self.normal_radii)
        return f"stratum {list(self.components)}: {self.count} boxes ({normal}; free {list(self.free_coordinates)})"


@dataclass(frozen=True)
class CoveringReport:
    rho: float
    count: int
    strata: tuple
    products: dict

    def to_json(self):
        return {"rho": self.rho, "N": self.count,
                "products": {f"{b}": v for b, v in self.products.items()},
                "sets": [s.describe() for s in self.strata]}


def covering_report(divisor, rho, betas=DEFAULT_BETAS):
    """Cover every stratum and report ``N(rho)`` with ``rho^{2n-2+beta} N(rho)``."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    disc = disc_band_cover(rho)
    covers = []
    total = 0
    for subset in divisor.strata():
        normal = tuple(divisor.components[i] for i in subset)
        free = tuple(j for j in range(divisor.n) if j not in normal)
        count = disc ** len(free)
        if count > COUNT_CAP:
            raise ResolutionError(f"covering count {count} exceeds the cap at rho={rho}")
        radii = tuple((divisor.components[i], rho ** divisor.orders[i]) for i in subset)
        covers.append(StratumCover(tuple(subset), free, radii, count))
        total += count
    products = {b: rho ** (2 * divisor.n - 2 + b) * total for b in betas}
    return CoveringReport(float(rho), total, tuple(covers), products)


@dataclass(frozen=True)
class CoveringSweep:
    reports: tuple
    strictly_decreasing: dict
    box_dimension: float


def covering_sweep(divisor, rhos=STANDARD_SWEEP, betas=DEFAULT_BETAS):
    """Reports along a decreasing ``rho`` sweep, decay check and box-dimension slope."""
    rhos = sorted(rhos, reverse=True)
    reports = tuple(covering_report(divisor, r, betas) for r in rhos)
    dec = {}
    for b in betas:
        vals = [r.products[b] for r in reports]
        dec[b] = all(v1 < v0 for v0, v1 in zip(vals, vals[1:]))
    counts = np.array([r.count for r in reports], dtype=float)
    if len(rhos) > 1:
        dim = float(np.polyfit(-np.log(rhos), np.log(counts), 1)[0])
    else:
        dim = float("nan")
    return CoveringSweep(reports, dec, dim)
