"""Sweep-result charts: one line per algorithm, mean over seeds, range band.

Strictly read-only over the CSV produced by the sweep runner; nothing here
imports the optimizer.  Expected columns: one numeric sweep axis, one group
column (the algorithm name), one numeric value column, typically with one
row per (seed, axis point, group).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(ValueError):
    """The CSV does not carry the columns the plot spec references."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    output_path: str
    axis_column: str = "cache_fraction"
    group_column: str = "algorithm"
    value_column: str = "objective"
    title: str | None = None
    ylabel: str = "average expected distortion reduction"


@dataclass
class SeriesPoint:
    axis: float
    mean: float
    low: float
    high: float
    count: int


def read_rows(path: str, spec: PlotSpec) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [
            c
            for c in (spec.axis_column, spec.group_column, spec.value_column)
            if c not in header
        ]
        if missing:
            raise SchemaError(f"CSV {path} lacks columns {missing}; has {header}")
        return list(reader)


def aggregate(rows: list[dict], spec: PlotSpec) -> dict[str, list[SeriesPoint]]:
    """Per group, per axis value: mean and min/max of the value column."""
    buckets: dict[tuple[str, float], list[float]] = {}
    for row in rows:
        key = (row[spec.group_column], float(row[spec.axis_column]))
        buckets.setdefault(key, []).append(float(row[spec.value_column]))
    series: dict[str, list[SeriesPoint]] = {}
    for (group, axis), values in sorted(buckets.items()):
        series.setdefault(group, []).append(
            SeriesPoint(
                axis=axis,
                mean=sum(values) / len(values),
                low=min(values),
                high=max(values),
                count=len(values),
            )
        )
    return series


def render(series: dict[str, list[SeriesPoint]], spec: PlotSpec):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for group, points in series.items():
        xs = [p.axis for p in points]
        ax.plot(xs, [p.mean for p in points], marker="o", label=group)
        ax.fill_between(
            xs, [p.low for p in points], [p.high for p in points], alpha=0.15
        )
    ax.set_xlabel(spec.axis_column)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    if series:
        ax.legend()
    fig.tight_layout()
    return fig


def plot_sweep(spec: PlotSpec) -> dict[str, list[SeriesPoint]]:
    """Render the chart to ``spec.output_path`` and return the plotted series."""
    rows = read_rows(spec.input_csv, spec)
    series = aggregate(rows, spec)
    fig = render(series, spec)
    fig.savefig(spec.output_path)
    plt.close(fig)
    return series
