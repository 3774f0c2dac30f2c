"""sweepplot: chart a sweep CSV, one line per algorithm."""

from __future__ import annotations

import argparse
import sys

from .plot import PlotSpec, SchemaError, plot_sweep


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="sweepplot", description=__doc__)
    parser.add_argument("--input", required=True, help="sweep CSV path")
    parser.add_argument("--output", required=True, help="image path (.png or .svg)")
    parser.add_argument("--axis", default="cache_fraction", help="x-axis column")
    parser.add_argument("--group", default="algorithm", help="one line per value")
    parser.add_argument("--value", default="objective", help="y-value column")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    spec = PlotSpec(
        input_csv=args.input,
        output_path=args.output,
        axis_column=args.axis,
        group_column=args.group,
        value_column=args.value,
        title=args.title,
    )
    try:
        series = plot_sweep(spec)
    except (FileNotFoundError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}: {len(series)} line(s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
