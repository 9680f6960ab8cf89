"""Metric geometry near the discriminant: model metrics, path lengths, meshes, coverings."""

from .covering import CoveringReport, DivisorModel, covering_report, covering_sweep
from .mesh import MetricMesh, boundary_diameter, grid_mesh, polar_mesh, torus_mesh
from .metrics import (ModelMetric, euclidean, from_degeneration, log_weighted, orbifold,
                      pullback, uniformize)
from .paths import Path, arc, concatenate, fit_log_power, path_length, radial, segment

__all__ = [
    "CoveringReport", "DivisorModel", "covering_report", "covering_sweep",
    "MetricMesh", "boundary_diameter", "grid_mesh", "polar_mesh", "torus_mesh",
    "ModelMetric", "euclidean", "from_degeneration", "log_weighted", "orbifold",
    "pullback", "uniformize",
    "Path", "arc", "concatenate", "fit_log_power", "path_length", "radial", "segment",
]
