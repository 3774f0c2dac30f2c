"""Joint cache-and-schedule greedy over the replaceable candidate pool.

The exhaustive ground set is exponential in covered users, so the default
optimizer walks the ``singleton-augment`` pool: every unfilled (station,
view, slot) offers single-user placements, every filled one offers
one-user extensions that replace the current element.  Feasibility of an
extension is judged on the swap (cache and uniqueness deltas are zero,
rate grows by one user's worth), and a candidate that does not fit is
discarded for good, exactly like the static greedy.

Scoring. The raw-gain strategy ("uc") ranks candidates by marginal gain.
The cost-benefit strategy ("wcb") divides the gain among the resources
one user-delivery notionally consumes -- the segment's bytes, one user's
rate, one placement slot -- the same vector for every candidate of a
slot regardless of which station hosts it (the macro station's boundless
cache is a budget that never binds, not a discount on the score).  With
equal segment sizes the two rankings therefore coincide exactly; with
per-slot sizes they part ways.

Runs stop once the best remaining gain hits zero: with a monotone
objective the left-over zero-gain tail cannot change the value, it would
only burn budget.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .engine import (
    BudgetSet,
    ConstraintKey,
    GreedyConfig,
    InstanceError,
    uc_greedy,
    wcb_greedy,
)
from .ground import (
    AUGMENT_MODE,
    CACHE_GROUP,
    EXHAUSTIVE_MODE,
    RATE_GROUP,
    UNIQUE_GROUP,
    GroundElement,
    budget_set,
    build_engine_instance,
    candidate_pool,
)
from .scenario import Scenario
from .views import viewpoint_distortions

UC = "uc"
WCB = "wcb"
ZERO_GAIN = 1e-15


@dataclass(frozen=True)
class JointPick:
    element: GroundElement
    gain: float
    accepted: bool
    rejected_constraint: ConstraintKey | None = None


@dataclass
class JointTrace:
    algorithm: str
    picks: list[JointPick]
    final_value: float
    start_value: float
    final_usage: dict[ConstraintKey, float]
    selected: tuple[GroundElement, ...]

    def to_lines(self) -> list[str]:
        lines = []
        for p in self.picks:
            reject = "-" if p.rejected_constraint is None else repr(p.rejected_constraint)
            e = p.element
            lines.append(
                f"{e.bs}\t{e.view}\t{e.slot}\t{','.join(map(str, e.users))}"
                f"\t{p.gain!r}\t{int(p.accepted)}\t{reject}"
            )
        return lines


class _SlotValues:
    """Memoized per-(delivered set, slot) popularity-weighted reduction sums.

    Marginal gains are computed from the local window only -- the nearest
    delivered views left and right of the candidate -- and memoized per
    (left, right, view, slot).  Deliveries outside the window cannot change
    the gain, so equal gains stay bit-identical across iterations, which
    keeps tie-breaking stable between the lazy and the naive greedy.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._cache: dict[tuple[frozenset[int], int], float] = {}
        self._window_cache: dict[tuple[int, int, int, int], float] = {}

    def value(self, delivered: frozenset[int], t: int) -> float:
        key = (delivered, t)
        got = self._cache.get(key)
        if got is None:
            dist = viewpoint_distortions(self.scenario.model, delivered)
            probs = self.scenario.popularity.probs
            d_max = self.scenario.model.d_max
            got = float(sum((d_max - d) * probs[k, t] for k, d in dist.items()))
            self._cache[key] = got
        return got

    def window_gain(self, left: int, right: int, view: int, t: int) -> float:
        """Reduction gained by delivering ``view`` between its nearest
        delivered neighbors ``left`` and ``right`` (one (user, slot) cell)."""
        key = (left, right, view, t)
        got = self._window_cache.get(key)
        if got is None:
            model = self.scenario.model
            probs = self.scenario.popularity.probs
            total = float(probs[view, t]) * model.distortion(view, left, right)
            for k in range(left + 1, right):
                if k == view:
                    continue
                new_pair = (left, view) if k < view else (view, right)
                improvement = model.distortion(k, left, right) - model.distortion(
                    k, *new_pair
                )
                total += float(probs[k, t]) * improvement
            self._window_cache[key] = total
            got = total
        return got


def singleton_cost_entries(
    scenario: Scenario, e: GroundElement, drop_cache: bool
) -> list[tuple[int, object, float]]:
    entries: list[tuple[int, object, float]] = []
    if e.bs != 0 and not drop_cache:
        entries.append((CACHE_GROUP, e.bs, scenario.segment_bytes[e.slot]))
    entries.append((RATE_GROUP, (e.bs, e.slot), len(e.users) * scenario.video_rate_mbps))
    entries.append((UNIQUE_GROUP, (e.bs, e.view, e.slot), 1.0))
    return entries


def replacement_feasibility(
    scenario: Scenario,
    selected: dict[tuple[int, int, int], tuple[int, ...]],
    candidate: GroundElement,
    usage: dict[ConstraintKey, float],
    budgets: BudgetSet,
    drop_cache: bool = False,
) -> tuple[bool, ConstraintKey | None, list[tuple[int, object, float]]]:
    """Delta-cost feasibility of a pool candidate against current usage.

    Extensions swap out the element they extend, so only the rate delta of
    the one new user is charged; fresh placements pay their full vector.
    Returns (fits, first violated constraint, delta entries to charge).
    """
    key = (candidate.bs, candidate.view, candidate.slot)
    base = selected.get(key)
    if base is None:
        entries = singleton_cost_entries(scenario, candidate, drop_cache)
    else:
        if len(candidate.users) != len(base) + 1 or not set(base) < set(candidate.users):
            raise InstanceError("candidate is not a one-user extension of the selection")
        entries = [(RATE_GROUP, (candidate.bs, candidate.slot), scenario.video_rate_mbps)]
    for group, ckey, amount in entries:
        ck = (group, ckey)
        limit = budgets.limit(ck)
        if usage.get(ck, 0.0) + amount > limit + 1e-12 * max(1.0, abs(limit)):
            return False, ck, entries
    return True, None, entries


def _score_factors(
    scenario: Scenario, algorithm: str, weights: tuple[float, ...], drop_cache: bool
) -> list[float]:
    """Per-slot gain multiplier turning a marginal gain into a greedy score."""
    if algorithm == UC:
        return [1.0] * scenario.num_slots
    if algorithm != WCB:
        raise InstanceError(f"unknown algorithm {algorithm!r}")
    l_cache, l_rate, l_unique = weights
    r = scenario.video_rate_mbps
    if drop_cache:
        rest = l_rate + l_unique
        if rest <= 0:
            raise InstanceError("cost-benefit weights put all mass on the cache group")
        return [(l_rate / rest) / r + (l_unique / rest)] * scenario.num_slots
    return [l_cache / b + l_rate / r + l_unique for b in scenario.segment_bytes]


def _run_augment_greedy(
    scenario: Scenario,
    algorithm: str,
    weights: tuple[float, ...],
    lazy: bool,
    allowed=None,
    drop_cache: bool = False,
) -> JointTrace:
    slot_values = _SlotValues(scenario)
    budgets = budget_set(scenario, drop_cache=drop_cache)
    factors = _score_factors(scenario, algorithm, weights, drop_cache)
    stop_score = ZERO_GAIN * min(factors)
    grid = scenario.grid
    mandatory = frozenset({grid.first_anchor, grid.last_anchor})
    T = scenario.num_slots
    inv = 1.0 / (scenario.num_users * T)

    cells: list[frozenset[int]] = [mandatory] * (scenario.num_users * T)
    selected: dict[tuple[int, int, int], tuple[int, ...]] = {}
    usage: dict[ConstraintKey, float] = {}
    discarded: set[GroundElement] = set()
    picks: list[JointPick] = []
    start_value = (
        sum(slot_values.value(mandatory, t) for t in range(T)) * scenario.num_users * inv
    )
    objective = start_value

    def is_allowed(e: GroundElement) -> bool:
        return allowed is None or allowed(e.bs, e.view, e.slot)

    def gain_of(e: GroundElement) -> float:
        new_user = e.users[-1] if len(e.users) == 1 else None
        if new_user is None:
            base = selected.get((e.bs, e.view, e.slot), ())
            new_user = next(u for u in e.users if u not in base)
        cell = cells[new_user * T + e.slot]
        if e.view in cell:
            return 0.0
        left = max(a for a in cell if a < e.view)
        right = min(a for a in cell if a > e.view)
        return slot_values.window_gain(left, right, e.view, e.slot) * inv

    def try_pick(e: GroundElement, gain: float) -> bool:
        """Accept or permanently discard; returns True when accepted."""
        ok, violated, entries = replacement_feasibility(
            scenario, selected, e, usage, budgets, drop_cache
        )
        if not ok:
            picks.append(JointPick(e, gain, False, violated))
            discarded.add(e)
            return False
        picks.append(JointPick(e, gain, True))
        base = selected.get((e.bs, e.view, e.slot), ())
        new_user = next(u for u in e.users if u not in base)
        selected[(e.bs, e.view, e.slot)] = e.users
        for group, ckey, amount in entries:
            ck = (group, ckey)
            usage[ck] = usage.get(ck, 0.0) + amount
        nonlocal objective
        objective += gain
        cells[new_user * T + e.slot] = cells[new_user * T + e.slot] | {e.view}
        return True

    if lazy:
        version = 0
        heap: list[tuple[float, GroundElement, tuple[int, ...], int, float]] = []

        def push(e: GroundElement, base: tuple[int, ...]):
            g = gain_of(e)
            heapq.heappush(heap, (-g * factors[e.slot], e, base, version, g))

        for bs in range(scenario.num_sbs + 1):
            for view in grid.cacheable_anchors():
                for slot in range(T):
                    if allowed is None or allowed(bs, view, slot):
                        for u in scenario.coverage.users_of_bs[bs]:
                            push(GroundElement(bs, view, slot, (u,)), ())
        while heap:
            neg_score, e, base, stamp, gain = heapq.heappop(heap)
            key = (e.bs, e.view, e.slot)
            if selected.get(key, ()) != base:
                continue  # superseded by a different selection at this key
            if stamp != version:
                g = gain_of(e)
                heapq.heappush(heap, (-g * factors[e.slot], e, base, version, g))
                continue
            if -neg_score <= stop_score:
                break  # nothing left can add value
            if try_pick(e, gain):
                version += 1
                covered = scenario.coverage.users_of_bs[e.bs]
                chosen = set(e.users)
                for u in covered:
                    if u not in chosen:
                        push(
                            GroundElement(
                                e.bs, e.view, e.slot, tuple(sorted(chosen | {u}))
                            ),
                            e.users,
                        )
    else:
        while True:
            pool = [
                e
                for e in candidate_pool(selected, scenario, AUGMENT_MODE)
                if e not in discarded and is_allowed(e)
            ]
            if not pool:
                break
            best = None
            best_score = -math.inf
            best_gain = 0.0
            for e in pool:  # canonical order: strict > keeps lowest on ties
                g = gain_of(e)
                score = g * factors[e.slot]
                if score > best_score:
                    best, best_score, best_gain = e, score, g
            if best_score <= stop_score:
                break
            try_pick(best, best_gain)

    return JointTrace(
        algorithm=algorithm,
        picks=picks,
        final_value=objective,
        start_value=start_value,
        final_usage=usage,
        selected=tuple(sorted(GroundElement(b, v, t, us) for (b, v, t), us in selected.items())),
    )


def joint_optimize(
    scenario: Scenario,
    algorithm: str = UC,
    weights: tuple[float, ...] = (0.2, 0.5, 0.3),
    candidate_mode: str = AUGMENT_MODE,
    lazy: bool = True,
) -> JointTrace:
    """Greedy joint caching + scheduling policy for one scenario.

    ``candidate_mode`` picks the pool: the default replaceable
    singleton-extension pool, or full subset enumeration handed to the
    static engine (tiny instances only, where the engine's cost-vector
    scoring applies verbatim).
    """
    if candidate_mode == AUGMENT_MODE:
        return _run_augment_greedy(scenario, algorithm, weights, lazy)
    if candidate_mode != EXHAUSTIVE_MODE:
        raise InstanceError(f"unknown candidate mode {candidate_mode!r}")
    instance = build_engine_instance(scenario, weights)
    if algorithm == UC:
        trace = uc_greedy(instance.ground, instance.oracle, instance.costs, instance.budgets, lazy)
    elif algorithm == WCB:
        trace = wcb_greedy(
            instance.ground,
            instance.oracle,
            instance.costs,
            instance.budgets,
            GreedyConfig(weights, lazy),
        )
    else:
        raise InstanceError(f"unknown algorithm {algorithm!r}")
    elements = instance.oracle.elements
    picks = [
        JointPick(elements[p.element], p.gain, p.accepted, p.rejected_constraint)
        for p in trace.picks
    ]
    accepted = tuple(sorted(elements[i] for i in trace.accepted()))
    return JointTrace(
        algorithm=algorithm,
        picks=picks,
        final_value=trace.final_value,
        start_value=instance.oracle.evaluate(frozenset()),
        final_usage=trace.final_costs,
        selected=accepted,
    )


def schedule_restricted(
    scenario: Scenario,
    allowed,
    algorithm: str = UC,
    weights: tuple[float, ...] = (0.2, 0.5, 0.3),
    lazy: bool = True,
) -> JointTrace:
    """Augment-pool greedy over a station/view/slot filter, cache already paid."""
    return _run_augment_greedy(
        scenario, algorithm, weights, lazy, allowed=allowed, drop_cache=True
    )
