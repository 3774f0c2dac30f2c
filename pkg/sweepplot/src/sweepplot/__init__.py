"""Read-only charting of sweep CSVs."""

__version__ = "0.1.0"

from .plot import PlotSpec, SchemaError, SeriesPoint, aggregate, plot_sweep, read_rows  # noqa: F401
