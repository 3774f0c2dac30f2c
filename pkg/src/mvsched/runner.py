"""Sweep harness: seeded scenario sweeps, certification, structure probes.

Everything here is deterministic given the config: scenario topologies
are derived from the run seeds, rows are sorted before writing, floats
are serialized with ``repr``.  Wall-clock timings go only to the metadata
sidecar so that repeated runs produce byte-identical CSV.
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import random
import statistics
from dataclasses import dataclass, field

from . import __version__
from .baselines import max_popularity_policy
from .engine import (
    ApproximationReport,
    CardinalitySquared,
    ProbeReport,
    approximation_report,
    monotonicity_probe,
    submodularity_probe,
)
from .ground import AUGMENT_MODE, EXHAUSTIVE_MODE, build_engine_instance
from .joint import UC, WCB, JointTrace, joint_optimize
from .scenario import (
    CellTopology,
    Scenario,
    ScenarioParams,
    build_scenario,
    load_topology,
)

JOINT_ALGOS = {"UC-J": UC, "WCB-J": WCB}
BASELINE_ALGOS = {"UC-MP": UC, "WCB-MP": WCB}
ALL_ALGOS = tuple(sorted(JOINT_ALGOS | BASELINE_ALGOS.keys()))

CACHE_AXIS = "cache_fraction"
RATE_AXIS = "mbs_rate_mbps"

#: Certification gate on max(UC, WCB) / OPT, just above the proven guarantee.
CERT_THRESHOLD = 0.3161


class UsageError(ValueError):
    """Bad config or arguments; maps to exit code 1."""


class BoundViolationError(RuntimeError):
    """A guaranteed ordering or bound failed; maps to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    sweep_axis: str
    sweep_values: tuple[float, ...]
    seeds: tuple[int, ...]
    algorithms: tuple[str, ...] = ("UC-J", "WCB-J", "UC-MP", "WCB-MP")
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    topology_path: str | None = None
    candidate_mode: str = AUGMENT_MODE
    weights: tuple[float, float, float] = (0.2, 0.5, 0.3)
    output_csv: str | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        try:
            sweep = doc["sweep"]
            axis = sweep["axis"]
            values = tuple(float(v) for v in sweep["values"])
            seeds = tuple(int(s) for s in doc["seeds"])
        except (KeyError, TypeError) as exc:
            raise UsageError(f"config missing required field: {exc}") from exc
        scen_doc = dict(doc.get("scenario", {}))
        unknown = set(scen_doc) - {f.name for f in dataclasses.fields(ScenarioParams)}
        if unknown:
            raise UsageError(f"unknown scenario fields: {sorted(unknown)}")
        cfg = cls(
            sweep_axis=axis,
            sweep_values=values,
            seeds=seeds,
            algorithms=tuple(doc.get("algorithms", ("UC-J", "WCB-J", "UC-MP", "WCB-MP"))),
            scenario=ScenarioParams(**scen_doc),
            topology_path=doc.get("topology_path"),
            candidate_mode=doc.get("candidate_mode", AUGMENT_MODE),
            weights=tuple(doc.get("weights", (0.2, 0.5, 0.3))),
            output_csv=doc.get("output_csv"),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.sweep_axis not in (CACHE_AXIS, RATE_AXIS):
            raise UsageError(f"unknown sweep axis {self.sweep_axis!r}")
        if not self.sweep_values or not self.seeds:
            raise UsageError("sweep values and seeds must be nonempty")
        if self.sweep_axis == CACHE_AXIS and any(
            not 0.0 <= v <= 1.0 for v in self.sweep_values
        ):
            raise UsageError("cache fractions must lie in [0, 1]")
        bad = [a for a in self.algorithms if a not in JOINT_ALGOS and a not in BASELINE_ALGOS]
        if bad or not self.algorithms:
            raise UsageError(f"unknown algorithms: {bad}")
        if self.candidate_mode not in (AUGMENT_MODE, EXHAUSTIVE_MODE):
            raise UsageError(f"unknown candidate mode {self.candidate_mode!r}")
        if len(self.weights) != 3 or abs(sum(self.weights) - 1.0) > 1e-12:
            raise UsageError("weights must be three values summing to 1")


@dataclass(frozen=True)
class SweepRow:
    seed: int
    axis_value: float
    algorithm: str
    objective: float
    empty_policy_value: float
    accepted_picks: int


def _scenario_for_point(
    config: ExperimentConfig, seed: int, axis_value: float
) -> Scenario:
    params = config.scenario
    if config.sweep_axis == CACHE_AXIS:
        params = dataclasses.replace(params, cache_fraction=axis_value, sbs_cache_bytes=None)
    else:
        params = dataclasses.replace(params, mbs_rate_mbps=axis_value)
    topology: CellTopology | None = None
    if config.topology_path is not None:
        topology = load_topology(config.topology_path)
        seg = params.segment_size_bytes()
        if config.sweep_axis == CACHE_AXIS:
            cache = axis_value * params.anchor_count * params.num_slots * seg
            topology = dataclasses.replace(
                topology,
                sbs=tuple(dataclasses.replace(c, cache_bytes=cache) for c in topology.sbs),
            )
        else:
            topology = dataclasses.replace(topology, mbs_rate_mbps=axis_value)
    return build_scenario(params, seed, topology)


def _run_algorithm(
    name: str, scenario: Scenario, config: ExperimentConfig
) -> JointTrace:
    if name in JOINT_ALGOS:
        return joint_optimize(
            scenario, JOINT_ALGOS[name], config.weights, config.candidate_mode
        )
    return max_popularity_policy(scenario, BASELINE_ALGOS[name], config.weights)


def run_sweep(
    config: ExperimentConfig,
) -> tuple[list[SweepRow], dict[tuple[int, float, str], JointTrace]]:
    """All (seed, sweep point, algorithm) runs, plus their traces.

    Raises BoundViolationError if a popularity baseline ever beats its
    joint counterpart on the same point: the joint policy optimizes over
    a superset of the baseline's choices and must dominate it.
    """
    rows: list[SweepRow] = []
    traces: dict[tuple[int, float, str], JointTrace] = {}
    for seed in config.seeds:
        for axis_value in config.sweep_values:
            scenario = _scenario_for_point(config, seed, axis_value)
            for name in config.algorithms:
                trace = _run_algorithm(name, scenario, config)
                traces[(seed, axis_value, name)] = trace
                rows.append(
                    SweepRow(
                        seed=seed,
                        axis_value=axis_value,
                        algorithm=name,
                        objective=trace.final_value,
                        empty_policy_value=trace.start_value,
                        accepted_picks=sum(p.accepted for p in trace.picks),
                    )
                )
    rows.sort(key=lambda r: (r.seed, r.axis_value, r.algorithm))
    for joint_name, base_name in (("UC-J", "UC-MP"), ("WCB-J", "WCB-MP")):
        if joint_name in config.algorithms and base_name in config.algorithms:
            by_key = {(r.seed, r.axis_value, r.algorithm): r.objective for r in rows}
            for seed in config.seeds:
                for axis_value in config.sweep_values:
                    joint = by_key[(seed, axis_value, joint_name)]
                    base = by_key[(seed, axis_value, base_name)]
                    if base > joint + 1e-9 * max(1.0, abs(joint)):
                        raise BoundViolationError(
                            f"baseline {base_name} beat {joint_name} at"
                            f" seed={seed} {config.sweep_axis}={axis_value}:"
                            f" {base} > {joint}"
                        )
    return rows, traces


def rows_to_csv(rows: list[SweepRow], axis: str) -> str:
    buf = io.StringIO()
    buf.write(f"seed,{axis},algorithm,objective,empty_policy_value,accepted_picks\n")
    for r in rows:
        buf.write(
            f"{r.seed},{r.axis_value!r},{r.algorithm},{r.objective!r},"
            f"{r.empty_policy_value!r},{r.accepted_picks}\n"
        )
    return buf.getvalue()


def config_to_dict(config: ExperimentConfig) -> dict:
    doc = dataclasses.asdict(config)
    doc["scenario"] = dataclasses.asdict(config.scenario)
    return doc


def config_hash(config: ExperimentConfig) -> str:
    canon = json.dumps(config_to_dict(config), sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


def run_metadata(config: ExperimentConfig, wall_time_s: float) -> dict:
    defaults = ScenarioParams()
    defaulted = [
        name
        for name in ("gamma", "alpha", "beta")
        if getattr(config.scenario, name) == getattr(defaults, name)
    ]
    return {
        "tool": "mvsched",
        "version": __version__,
        "config": config_to_dict(config),
        "config_sha256": config_hash(config),
        "distortion_params_defaulted": defaulted,
        "wall_time_s": wall_time_s,
    }


def monotone_along_axis(rows: list[SweepRow]) -> list[str]:
    """Objective dips along the sweep axis, per (seed, algorithm); [] if none."""
    complaints = []
    series: dict[tuple[int, str], list[tuple[float, float]]] = {}
    for r in rows:
        series.setdefault((r.seed, r.algorithm), []).append((r.axis_value, r.objective))
    for (seed, algo), points in sorted(series.items()):
        points.sort()
        for (x0, y0), (x1, y1) in zip(points, points[1:]):
            if y1 < y0 - 1e-9 * max(1.0, abs(y0)):
                complaints.append(
                    f"seed={seed} {algo}: objective fell from {y0} at {x0} to {y1} at {x1}"
                )
    return complaints


@dataclass(frozen=True)
class TinyInstanceParams:
    """Bounds for randomly drawn certification instances (kept exhaustively solvable)."""

    max_sbs: int = 2
    max_users: int = 3
    anchor_count: int = 4
    virtual_per_gap: int = 1
    num_slots: int = 1


def tiny_scenario(seed: int, params: TinyInstanceParams = TinyInstanceParams()) -> Scenario:
    """A randomized exhaustively-solvable scenario; budgets vary across seeds."""
    rng = random.Random(seed)
    segment = 2.0 * 1.0 * 1e6 / 8.0
    scen = ScenarioParams(
        num_sbs=rng.randint(1, params.max_sbs),
        num_users=rng.randint(2, params.max_users),
        mbs_radius_m=100.0,
        sbs_radius_m=rng.uniform(40.0, 100.0),
        mbs_rate_mbps=rng.choice([0.0, 2.0, 4.0]),
        sbs_rate_mbps=rng.choice([2.0, 4.0, 6.0]),
        sbs_cache_bytes=rng.choice([0.0, segment, 2.0 * segment, 3.0 * segment]),
        cache_fraction=None,
        anchor_count=params.anchor_count,
        virtual_per_gap=params.virtual_per_gap,
        num_slots=params.num_slots,
        gamma=rng.uniform(0.5, 2.0),
        alpha=rng.uniform(0.0, 0.3),
        beta=rng.uniform(0.1, 0.8),
    )
    return build_scenario(scen, seed)


@dataclass
class CertificationReport:
    reports: list[ApproximationReport]
    threshold: float = CERT_THRESHOLD

    @property
    def min_ratio(self) -> float:
        return min(r.ratio for r in self.reports)

    @property
    def median_ratio(self) -> float:
        return statistics.median(r.ratio for r in self.reports)

    @property
    def ok(self) -> bool:
        return all(r.ratio > self.threshold - 1e-9 for r in self.reports)

    def lines(self) -> list[str]:
        out = ["seed\tuc\twcb\topt\tratio"]
        for r in self.reports:
            out.append(
                f"{r.seed}\t{r.uc_value!r}\t{r.wcb_value!r}\t{r.opt_value!r}\t{r.ratio!r}"
            )
        out.append(f"min_ratio\t{self.min_ratio!r}")
        out.append(f"median_ratio\t{self.median_ratio!r}")
        out.append(f"threshold\t{self.threshold!r}")
        out.append(f"certified\t{int(self.ok)}")
        return out


def tiny_certify(
    seeds: tuple[int, ...],
    weights: tuple[float, float, float] = (0.2, 0.5, 0.3),
    params: TinyInstanceParams = TinyInstanceParams(),
) -> CertificationReport:
    """Exhaustive-vs-greedy ratio on seeded tiny instances."""
    reports = []
    for seed in seeds:
        scenario = tiny_scenario(seed, params)
        instance = build_engine_instance(scenario, weights)
        reports.append(approximation_report(instance, rng_seed=seed))
    return CertificationReport(reports)


@dataclass
class ProbeSuiteReport:
    monotonicity: ProbeReport
    submodularity: ProbeReport
    control: ProbeReport

    @property
    def ok(self) -> bool:
        """Clean domain probes, and a control that the probe demonstrably catches."""
        return (
            self.monotonicity.clean
            and self.submodularity.clean
            and self.control.violations > 0
        )

    def lines(self) -> list[str]:
        out = []
        for name, rep in (
            ("monotonicity", self.monotonicity),
            ("submodularity", self.submodularity),
            ("supermodular_control", self.control),
        ):
            out.append(
                f"{name}\ttrials={rep.trials}\tviolations={rep.violations}"
                f"\tmax_violation={rep.max_violation!r}"
            )
        out.append(f"ok\t{int(self.ok)}")
        return out


def probe_scenario(seed: int = 0) -> Scenario:
    """Medium-size scenario used for structural probes."""
    return build_scenario(
        ScenarioParams(
            num_sbs=3,
            num_users=6,
            mbs_radius_m=150.0,
            sbs_radius_m=100.0,
            mbs_rate_mbps=6.0,
            sbs_rate_mbps=4.0,
            sbs_cache_bytes=2 * 250000.0,
            cache_fraction=None,
            anchor_count=6,
            virtual_per_gap=2,
            num_slots=2,
        ),
        seed,
    )


def probe_suite(trials: int = 1000, rng_seed: int = 0) -> ProbeSuiteReport:
    """Structure probes on the streaming objective plus a supermodular control."""
    scenario = probe_scenario(rng_seed)
    instance = build_engine_instance(scenario)
    mono = monotonicity_probe(instance.oracle, instance.ground, trials, rng_seed)
    sub = submodularity_probe(instance.oracle, instance.ground, trials, rng_seed)
    control = submodularity_probe(
        CardinalitySquared(), range(12), max(trials, 50), rng_seed
    )
    return ProbeSuiteReport(mono, sub, control)
