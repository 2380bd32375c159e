"""Plotting frontend for quapidyn CSV output."""

from .csvio import SchemaError, Table, read_overlay, read_table
from .render import (
    STYLE_VERSION,
    STYLES,
    OverlaySpec,
    PlotJob,
    build_figure,
    build_grid_figure,
    gallery,
    render,
    render_grid,
)

__version__ = "0.1.0"

__all__ = [
    "SchemaError",
    "Table",
    "read_table",
    "read_overlay",
    "OverlaySpec",
    "PlotJob",
    "STYLES",
    "STYLE_VERSION",
    "build_figure",
    "build_grid_figure",
    "render",
    "render_grid",
    "gallery",
    "__version__",
]
