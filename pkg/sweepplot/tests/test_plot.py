import csv
import json
import statistics
import subprocess
import sys
from pathlib import Path

import pytest

from sweepplot.plot import PlotSpec, SchemaError, aggregate, plot_sweep, read_rows, render

CSV_TEXT = """seed,cache_fraction,algorithm,objective,empty_policy_value,accepted_picks
0,0.05,UC-J,1.10,0.8,10
0,0.10,UC-J,1.20,0.8,12
1,0.05,UC-J,1.14,0.8,11
1,0.10,UC-J,1.30,0.8,13
0,0.05,UC-MP,1.00,0.8,9
0,0.10,UC-MP,1.05,0.8,9
1,0.05,UC-MP,1.02,0.8,9
1,0.10,UC-MP,1.11,0.8,10
"""


@pytest.fixture
def csv_path(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text(CSV_TEXT)
    return path


def spec_for(path, out):
    return PlotSpec(input_csv=str(path), output_path=str(out))


def independent_means(path, spec):
    """Group-by mean straight off the file, sharing nothing with aggregate()."""
    groups = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row[spec.group_column], float(row[spec.axis_column]))
            groups.setdefault(key, []).append(float(row[spec.value_column]))
    return {key: statistics.fmean(vals) for key, vals in groups.items()}


def test_aggregation_matches_independent_recount(csv_path, tmp_path):
    spec = spec_for(csv_path, tmp_path / "out.png")
    series = plot_sweep(spec)
    expected = independent_means(csv_path, spec)
    for group, points in series.items():
        for p in points:
            assert abs(p.mean - expected[(group, p.axis)]) <= 1e-12
    assert (tmp_path / "out.png").stat().st_size > 0


def test_one_line_per_algorithm(csv_path, tmp_path):
    spec = spec_for(csv_path, tmp_path / "out.svg")
    series = aggregate(read_rows(str(csv_path), spec), spec)
    fig = render(series, spec)
    assert len(fig.axes[0].lines) == 2  # UC-J and UC-MP
    labels = sorted(line.get_label() for line in fig.axes[0].lines)
    assert labels == ["UC-J", "UC-MP"]


def test_single_group_three_points(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text(
        "seed,cache_fraction,algorithm,objective\n"
        "0,0.1,UC-J,1.0\n0,0.2,UC-J,1.5\n0,0.4,UC-J,1.7\n"
    )
    spec = spec_for(path, tmp_path / "one.png")
    series = plot_sweep(spec)
    assert list(series) == ["UC-J"]
    assert [p.axis for p in series["UC-J"]] == [0.1, 0.2, 0.4]
    assert [p.mean for p in series["UC-J"]] == [1.0, 1.5, 1.7]
    fig = render(series, spec)
    assert len(fig.axes[0].lines) == 1


def test_range_band_tracks_min_max(csv_path, tmp_path):
    spec = spec_for(csv_path, tmp_path / "out.png")
    series = aggregate(read_rows(str(csv_path), spec), spec)
    point = next(p for p in series["UC-J"] if p.axis == 0.10)
    assert (point.low, point.high, point.count) == (1.20, 1.30, 2)


def test_missing_column_is_schema_error(csv_path, tmp_path):
    spec = PlotSpec(
        input_csv=str(csv_path),
        output_path=str(tmp_path / "x.png"),
        value_column="nope",
    )
    with pytest.raises(SchemaError):
        plot_sweep(spec)


def test_cli_end_to_end(csv_path, tmp_path):
    out = tmp_path / "chart.png"
    proc = subprocess.run(
        [sys.executable, "-m", "sweepplot.cli", "--input", str(csv_path), "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "2 line(s)" in proc.stdout
    assert out.exists()
    bad = subprocess.run(
        [sys.executable, "-m", "sweepplot.cli", "--input", "missing.csv", "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert bad.returncode == 1


def test_against_real_runner_output(tmp_path):
    """Full pipeline: the optimizer CLI writes the CSV, this tool charts it."""
    mvsched = pytest.importorskip("mvsched")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "sweep": {"axis": "cache_fraction", "values": [0.0, 0.25]},
                "seeds": [0, 1],
                "scenario": {
                    "num_sbs": 1,
                    "num_users": 3,
                    "mbs_radius_m": 100.0,
                    "sbs_radius_m": 100.0,
                    "mbs_rate_mbps": 4.0,
                    "sbs_rate_mbps": 4.0,
                    "anchor_count": 4,
                    "virtual_per_gap": 1,
                    "num_slots": 2,
                },
            }
        )
    )
    csv_out = tmp_path / "sweep.csv"
    run = subprocess.run(
        [sys.executable, "-m", "mvsched.cli", "run", "--config", str(cfg), "--out", str(csv_out)],
        capture_output=True,
        text=True,
    )
    assert run.returncode == 0, run.stderr
    spec = spec_for(csv_out, tmp_path / "fig.svg")
    series = plot_sweep(spec)
    assert sorted(series) == ["UC-J", "UC-MP", "WCB-J", "WCB-MP"]
    expected = independent_means(csv_out, spec)
    for group, points in series.items():
        for p in points:
            assert abs(p.mean - expected[(group, p.axis)]) <= 1e-12
    assert Path(spec.output_path).stat().st_size > 0
