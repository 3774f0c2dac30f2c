"""Command line front end.

Verbs: run (sweep to CSV + metadata), certify (greedy-vs-exhaustive ratio
gate), probe (structure probes), gen-topology, validate.  Exit codes:
0 success, 1 usage error, 2 property or bound violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .runner import (
    BoundViolationError,
    ExperimentConfig,
    UsageError,
    monotone_along_axis,
    probe_suite,
    rows_to_csv,
    run_metadata,
    run_sweep,
    tiny_certify,
)
from .scenario import (
    TopologyParams,
    coverage_sets,
    generate_topology,
    load_topology,
    save_topology,
    validate_scenario,
)


def _cmd_run(args: argparse.Namespace) -> int:
    with open(args.config) as fh:
        config = ExperimentConfig.from_dict(json.load(fh))
    out = args.out or config.output_csv
    if out is None:
        raise UsageError("no output path: pass --out or set output_csv in the config")
    started = time.perf_counter()
    rows, traces = run_sweep(config)
    wall = time.perf_counter() - started
    csv_text = rows_to_csv(rows, config.sweep_axis)
    with open(out, "w") as fh:
        fh.write(csv_text)
    with open(out + ".meta.json", "w") as fh:
        json.dump(run_metadata(config, wall), fh, indent=1, default=str)
        fh.write("\n")
    if args.trace_dir:
        os.makedirs(args.trace_dir, exist_ok=True)
        for (seed, axis_value, name), trace in sorted(traces.items()):
            fname = f"trace_s{seed}_{config.sweep_axis}{axis_value!r}_{name}.tsv"
            with open(os.path.join(args.trace_dir, fname), "w") as fh:
                fh.write("\n".join(trace.to_lines()) + "\n")
    dips = monotone_along_axis(rows)
    for line in dips:
        print(f"warning: {line}", file=sys.stderr)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _cmd_certify(args: argparse.Namespace) -> int:
    report = tiny_certify(tuple(range(args.seeds)))
    print("\n".join(report.lines()))
    return 0 if report.ok else 2


def _cmd_probe(args: argparse.Namespace) -> int:
    report = probe_suite(args.trials, args.seed)
    print("\n".join(report.lines()))
    return 0 if report.ok else 2


def _cmd_gen_topology(args: argparse.Namespace) -> int:
    params = TopologyParams(
        mbs_radius_m=args.mbs_radius,
        mbs_rate_mbps=args.mbs_rate,
        num_sbs=args.sbs,
        sbs_radius_m=args.sbs_radius,
        sbs_cache_bytes=args.sbs_cache,
        sbs_rate_mbps=args.sbs_rate,
        num_users=args.users,
    )
    save_topology(generate_topology(params, args.seed), args.out)
    print(f"wrote topology to {args.out}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    topology = load_topology(args.topology)
    try:
        warnings = validate_scenario(topology, coverage_sets(topology))
    except ValueError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    for w in warnings:
        print(f"warning: {w}")
    print("topology structurally valid")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvsched", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="run a sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="CSV path (default: config output_csv)")
    p.add_argument("--trace-dir", default=None, help="also write per-run traces here")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("certify", help="greedy/optimal ratio gate on tiny instances")
    p.add_argument("--seeds", type=int, default=50)
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("probe", help="monotonicity/submodularity probes")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_probe)

    p = sub.add_parser("gen-topology", help="drop a seeded topology to JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mbs-radius", type=float, default=400.0)
    p.add_argument("--mbs-rate", type=float, default=200.0)
    p.add_argument("--sbs", type=int, default=20)
    p.add_argument("--sbs-radius", type=float, default=100.0)
    p.add_argument("--sbs-cache", type=float, default=5e6)
    p.add_argument("--sbs-rate", type=float, default=100.0)
    p.add_argument("--users", type=int, default=200)
    p.set_defaults(fn=_cmd_gen_topology)

    p = sub.add_parser("validate", help="check a topology file")
    p.add_argument("--topology", required=True)
    p.set_defaults(fn=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BoundViolationError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
