"""Macro-cell topology, coverage sets, and the frozen scenario bundle.

One macro base station (MBS) at the origin covers a disk; small base
stations (SBS) and users are dropped i.i.d. uniformly over that disk.
Coverage is closed-disk: a user at exactly the coverage radius counts as
covered.  Interference is not modeled; a user may receive from every
base station whose disk contains it, and always from the MBS.

Units are explicit throughout: meters for geometry, Mbps for link
capacity, bytes for storage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .popularity import PopularityTable, popularity_table
from .views import DistortionModel, ViewGrid


@dataclass(frozen=True)
class SmallCell:
    x_m: float
    y_m: float
    radius_m: float
    cache_bytes: float
    rate_mbps: float


@dataclass(frozen=True)
class CellTopology:
    mbs_radius_m: float
    mbs_rate_mbps: float
    sbs: tuple[SmallCell, ...]
    users: tuple[tuple[float, float], ...]
    rng_seed: int

    def __post_init__(self):
        if self.mbs_radius_m <= 0:
            raise ValueError("MBS radius must be positive")
        if not self.users:
            raise ValueError("topology needs at least one user")

    @property
    def num_sbs(self) -> int:
        return len(self.sbs)

    @property
    def num_users(self) -> int:
        return len(self.users)


@dataclass(frozen=True)
class TopologyParams:
    mbs_radius_m: float = 400.0
    mbs_rate_mbps: float = 200.0
    num_sbs: int = 20
    sbs_radius_m: float = 100.0
    sbs_cache_bytes: float = 5e6
    sbs_rate_mbps: float = 100.0
    num_users: int = 200


def generate_topology(params: TopologyParams, rng_seed: int) -> CellTopology:
    """Drop SBS centers and users uniformly over the macro disk, seeded."""
    if params.num_sbs <= 0 or params.num_users <= 0:
        raise ValueError("counts must be positive")
    if params.sbs_radius_m <= 0 or params.mbs_radius_m <= 0:
        raise ValueError("radii must be positive")
    rng = np.random.default_rng(rng_seed)

    def disk_points(n: int) -> list[tuple[float, float]]:
        r = params.mbs_radius_m * np.sqrt(rng.random(n))
        theta = 2.0 * math.pi * rng.random(n)
        return [(float(ri * math.cos(ti)), float(ri * math.sin(ti))) for ri, ti in zip(r, theta)]

    cells = tuple(
        SmallCell(x, y, params.sbs_radius_m, params.sbs_cache_bytes, params.sbs_rate_mbps)
        for x, y in disk_points(params.num_sbs)
    )
    users = tuple(disk_points(params.num_users))
    return CellTopology(params.mbs_radius_m, params.mbs_rate_mbps, cells, users, rng_seed)


@dataclass(frozen=True)
class CoverageSets:
    """users_of_bs[n] lists users covered by base station n (0 = MBS = everyone)."""

    users_of_bs: tuple[tuple[int, ...], ...]
    bs_of_user: tuple[tuple[int, ...], ...]


def coverage_sets(topology: CellTopology) -> CoverageSets:
    users_of_bs: list[tuple[int, ...]] = [tuple(range(topology.num_users))]
    bs_of_user: list[list[int]] = [[0] for _ in topology.users]
    for n, cell in enumerate(topology.sbs, start=1):
        covered = []
        for u, (ux, uy) in enumerate(topology.users):
            if math.hypot(ux - cell.x_m, uy - cell.y_m) <= cell.radius_m:
                covered.append(u)
                bs_of_user[u].append(n)
        users_of_bs.append(tuple(covered))
    return CoverageSets(tuple(users_of_bs), tuple(tuple(b) for b in bs_of_user))


def validate_scenario(topology: CellTopology, coverage: CoverageSets) -> list[str]:
    """Structural warnings; raises only on a genuinely broken topology."""
    for u, (ux, uy) in enumerate(topology.users):
        if math.hypot(ux, uy) > topology.mbs_radius_m + 1e-9:
            raise ValueError(f"user {u} lies outside the macro cell")
    warnings = []
    for n, covered in enumerate(coverage.users_of_bs[1:], start=1):
        if not covered:
            warnings.append(f"SBS {n} covers no users")
    for u, stations in enumerate(coverage.bs_of_user):
        if stations == (0,):
            warnings.append(f"user {u} is covered by the MBS only")
    if topology.mbs_rate_mbps == 0:
        warnings.append("MBS rate budget is zero")
    for n, cell in enumerate(topology.sbs, start=1):
        if cell.cache_bytes == 0:
            warnings.append(f"SBS {n} has zero cache")
        if cell.rate_mbps == 0:
            warnings.append(f"SBS {n} has zero rate budget")
    return warnings


def save_topology(topology: CellTopology, path: str) -> None:
    doc = {
        "units": {"distance": "m", "rate": "Mbps", "cache": "bytes"},
        "mbs_radius_m": topology.mbs_radius_m,
        "mbs_rate_mbps": topology.mbs_rate_mbps,
        "rng_seed": topology.rng_seed,
        "sbs": [asdict(c) for c in topology.sbs],
        "users": [{"x_m": x, "y_m": y} for x, y in topology.users],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_topology(path: str) -> CellTopology:
    with open(path) as fh:
        doc = json.load(fh)
    return CellTopology(
        mbs_radius_m=doc["mbs_radius_m"],
        mbs_rate_mbps=doc["mbs_rate_mbps"],
        sbs=tuple(SmallCell(**c) for c in doc["sbs"]),
        users=tuple((u["x_m"], u["y_m"]) for u in doc["users"]),
        rng_seed=doc["rng_seed"],
    )


@dataclass(frozen=True)
class Scenario:
    """Everything one streaming session needs, immutable once built.

    ``segment_bytes[t]`` is the size of any view's slot-t segment (views
    are symmetrically coded, so size does not depend on the view).
    """

    grid: ViewGrid
    model: DistortionModel
    topology: CellTopology
    coverage: CoverageSets
    popularity: PopularityTable
    num_slots: int
    video_rate_mbps: float
    segment_bytes: tuple[float, ...]

    def __post_init__(self):
        if len(self.segment_bytes) != self.num_slots:
            raise ValueError("one segment size per slot required")
        if self.video_rate_mbps <= 0 or any(b <= 0 for b in self.segment_bytes):
            raise ValueError("rate and segment sizes must be positive")
        if self.popularity.num_slots != self.num_slots:
            raise ValueError("popularity table must cover every slot")

    @property
    def num_users(self) -> int:
        return self.topology.num_users

    @property
    def num_sbs(self) -> int:
        return self.topology.num_sbs

    def bs_rate_mbps(self, n: int) -> float:
        return self.topology.mbs_rate_mbps if n == 0 else self.topology.sbs[n - 1].rate_mbps

    def total_video_bytes(self) -> float:
        """Whole-catalogue size: every camera view times every slot."""
        return self.grid.anchor_count * sum(self.segment_bytes)


@dataclass(frozen=True)
class ScenarioParams:
    """Knobs for building a scenario from scratch (all defaults desk-scale)."""

    num_sbs: int = 5
    num_users: int = 20
    mbs_radius_m: float = 200.0
    sbs_radius_m: float = 100.0
    mbs_rate_mbps: float = 50.0
    sbs_rate_mbps: float = 10.0
    sbs_cache_bytes: float | None = None
    cache_fraction: float | None = 0.1
    anchor_count: int = 6
    virtual_per_gap: int = 3
    num_slots: int = 5
    video_rate_mbps: float = 2.0
    segment_duration_s: float = 1.0
    gamma: float = 1.0
    alpha: float = 0.05
    beta: float = 0.3
    window: float = 8.0
    sigma2: float | None = None

    def segment_size_bytes(self) -> float:
        return self.video_rate_mbps * self.segment_duration_s * 1e6 / 8.0


def build_scenario(
    params: ScenarioParams, rng_seed: int, topology: CellTopology | None = None
) -> Scenario:
    """Assemble a frozen scenario; the seed drives the topology drop only."""
    grid = ViewGrid(params.anchor_count, params.virtual_per_gap)
    model = DistortionModel.for_grid(grid, params.gamma, params.alpha, params.beta)
    seg = params.segment_size_bytes()
    if topology is None:
        cache = params.sbs_cache_bytes
        if cache is None:
            if params.cache_fraction is None:
                raise ValueError("need sbs_cache_bytes or cache_fraction")
            cache = params.cache_fraction * params.anchor_count * params.num_slots * seg
        topology = generate_topology(
            TopologyParams(
                mbs_radius_m=params.mbs_radius_m,
                mbs_rate_mbps=params.mbs_rate_mbps,
                num_sbs=params.num_sbs,
                sbs_radius_m=params.sbs_radius_m,
                sbs_cache_bytes=cache,
                sbs_rate_mbps=params.sbs_rate_mbps,
                num_users=params.num_users,
            ),
            rng_seed,
        )
    coverage = coverage_sets(topology)
    validate_scenario(topology, coverage)
    pop = popularity_table(grid, params.num_slots, params.window, params.sigma2)
    return Scenario(
        grid=grid,
        model=model,
        topology=topology,
        coverage=coverage,
        popularity=pop,
        num_slots=params.num_slots,
        video_rate_mbps=params.video_rate_mbps,
        segment_bytes=tuple(seg for _ in range(params.num_slots)),
    )
