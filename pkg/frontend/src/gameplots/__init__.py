"""Static plotting for simulator CSV outputs."""

from .io import (SCHEMA_LINE, SchemaError, TRAJECTORY_HEADER, WELFARE_HEADER,
                 read_trajectory, read_welfare)
from .plots import (KINDS, PlotDataError, PlotSpec, plot_trajectory3d,
                    plot_tsw_sweep)

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "PlotDataError",
    "PlotSpec",
    "SCHEMA_LINE",
    "SchemaError",
    "TRAJECTORY_HEADER",
    "WELFARE_HEADER",
    "plot_trajectory3d",
    "plot_tsw_sweep",
    "read_trajectory",
    "read_welfare",
]
