"""Placement/delivery atoms, their costs, and candidate enumeration.

A ground element bundles one decision: put the slot-``slot`` segment of
camera view ``view`` on base station ``bs`` and deliver it to the user
subset ``users``.  Costs fall into three separable groups:

  group 1  cache bytes, one constraint per SBS (the MBS stores for free),
  group 2  delivery rate, one constraint per (station, slot),
  group 3  placement uniqueness, one constraint per (station, view, slot),

with budgets C_n, R_n and 1 respectively.  Enumerating every user subset
is exponential, so besides the tiny-instance ``exhaustive-subsets`` mode
there is a ``singleton-augment`` mode that offers single-user placements
plus one-user extensions of already selected elements; extension chains
reach any subset while keeping costs and feasibility exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .engine import BudgetSet, CostVector, EngineInstance, InstanceError
from .scenario import Scenario

CACHE_GROUP = 1
RATE_GROUP = 2
UNIQUE_GROUP = 3

EXHAUSTIVE_MODE = "exhaustive-subsets"
AUGMENT_MODE = "singleton-augment"

#: exhaustive-subsets enumerates 2^|users| subsets per station; hard ceiling.
MAX_EXHAUSTIVE_USERS = 12


@dataclass(frozen=True, order=True)
class GroundElement:
    """One caching+scheduling atom; ordering is the canonical one."""

    bs: int
    view: int  # grid index of a cacheable anchor
    slot: int
    users: tuple[int, ...]  # strictly increasing


def validate_element(scenario: Scenario, e: GroundElement) -> None:
    if not 0 <= e.bs <= scenario.num_sbs:
        raise InstanceError(f"unknown base station {e.bs}")
    if e.view not in scenario.grid.cacheable_anchors():
        raise InstanceError(f"view {e.view} is not a cacheable anchor")
    if not 0 <= e.slot < scenario.num_slots:
        raise InstanceError(f"slot {e.slot} out of range")
    if not e.users or list(e.users) != sorted(set(e.users)):
        raise InstanceError("users must be a nonempty strictly increasing tuple")
    covered = set(scenario.coverage.users_of_bs[e.bs])
    if not set(e.users) <= covered:
        raise InstanceError(f"users {e.users} not all covered by station {e.bs}")


def cost_vector(e: GroundElement, scenario: Scenario) -> CostVector:
    """Resource consumption of one element; the MBS pays no cache cost."""
    entries = []
    if e.bs != 0:
        entries.append((CACHE_GROUP, e.bs, scenario.segment_bytes[e.slot]))
    entries.append((RATE_GROUP, (e.bs, e.slot), len(e.users) * scenario.video_rate_mbps))
    entries.append((UNIQUE_GROUP, (e.bs, e.view, e.slot), 1.0))
    return CostVector(tuple(entries))


def budget_set(scenario: Scenario, drop_cache: bool = False) -> BudgetSet:
    """Budgets for every constraint any element can touch."""
    budgets: dict = {}
    if not drop_cache:
        for n in range(1, scenario.num_sbs + 1):
            budgets[(CACHE_GROUP, n)] = scenario.topology.sbs[n - 1].cache_bytes
    for n in range(scenario.num_sbs + 1):
        for t in range(scenario.num_slots):
            budgets[(RATE_GROUP, (n, t))] = scenario.bs_rate_mbps(n)
            for v in scenario.grid.cacheable_anchors():
                budgets[(UNIQUE_GROUP, (n, v, t))] = 1.0
    return BudgetSet(budgets)


def exhaustive_ground(scenario: Scenario) -> tuple[GroundElement, ...]:
    """Every (station, user subset, view, slot) atom, canonically ordered."""
    elements = []
    for bs in range(scenario.num_sbs + 1):
        covered = scenario.coverage.users_of_bs[bs]
        if len(covered) > MAX_EXHAUSTIVE_USERS:
            raise InstanceError(
                f"station {bs} covers {len(covered)} users;"
                f" exhaustive subsets capped at {MAX_EXHAUSTIVE_USERS}"
            )
        subsets = [
            tuple(c)
            for size in range(1, len(covered) + 1)
            for c in itertools.combinations(covered, size)
        ]
        for view in scenario.grid.cacheable_anchors():
            for slot in range(scenario.num_slots):
                for users in subsets:
                    elements.append(GroundElement(bs, view, slot, users))
    return tuple(sorted(elements))


def candidate_pool(
    current: dict[tuple[int, int, int], tuple[int, ...]] | set[GroundElement],
    scenario: Scenario,
    mode: str = AUGMENT_MODE,
) -> list[GroundElement]:
    """Candidates reachable from the current selection.

    ``current`` maps (station, view, slot) to the selected user tuple (a
    set of elements is accepted and converted).  In the default mode each
    unfilled (station, view, slot) offers all single-user placements and
    each filled one offers all one-user extensions, understood as
    replacing the selected element.  The exhaustive mode ignores the
    extension structure and returns every not-yet-selected subset atom.
    """
    if isinstance(current, (set, frozenset, list, tuple)):
        current = {(e.bs, e.view, e.slot): e.users for e in current}
    if mode == EXHAUSTIVE_MODE:
        taken = {
            GroundElement(bs, view, slot, users)
            for (bs, view, slot), users in current.items()
        }
        return [e for e in exhaustive_ground(scenario) if e not in taken]
    if mode != AUGMENT_MODE:
        raise InstanceError(f"unknown candidate mode {mode!r}")
    pool = []
    for bs in range(scenario.num_sbs + 1):
        covered = scenario.coverage.users_of_bs[bs]
        for view in scenario.grid.cacheable_anchors():
            for slot in range(scenario.num_slots):
                selected = current.get((bs, view, slot))
                if selected is None:
                    pool.extend(
                        GroundElement(bs, view, slot, (u,)) for u in covered
                    )
                else:
                    chosen = set(selected)
                    pool.extend(
                        GroundElement(bs, view, slot, tuple(sorted(chosen | {u})))
                        for u in covered
                        if u not in chosen
                    )
    return sorted(pool)


def build_engine_instance(
    scenario: Scenario, weights: tuple[float, ...] = (0.2, 0.5, 0.3)
) -> EngineInstance:
    """Static exhaustive-subsets instance for the generic engine."""
    from .oracle import DeliveryOracle  # local import to avoid a cycle

    elements = exhaustive_ground(scenario)
    oracle = DeliveryOracle(scenario, elements)
    costs = {i: cost_vector(e, scenario) for i, e in enumerate(elements)}
    return EngineInstance(
        ground=tuple(range(len(elements))),
        oracle=oracle,
        costs=costs,
        budgets=budget_set(scenario),
        weights=weights,
    )
