"""Figure rendering for GHZ distillation result CSVs."""

__version__ = "0.1.0"

from .render import ColumnError, PlotSpec, load_rows, render

__all__ = ["ColumnError", "PlotSpec", "load_rows", "render"]
