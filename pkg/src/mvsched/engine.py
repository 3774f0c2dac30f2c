"""Greedy maximization of monotone submodular set functions under
separable multi-group knapsack budgets.

Elements of the ground set are small integers (their position in the
instance's canonical ordering).  Each element carries a cost vector that
touches at most one constraint per cost group; budgets cap the cumulative
cost on every constraint.  Two greedy strategies are provided:

* ``uc_greedy``  -- picks the raw best marginal gain each round,
* ``wcb_greedy`` -- picks the best weighted sum of gain-to-cost ratios,

both with the same accept-or-permanently-discard feasibility rule.  A
pruned depth-first ``exhaustive_optimum`` certifies small instances, and
statistical probes give evidence for (or against) monotonicity and
submodularity of a caller-supplied value oracle.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

ElementId = int
ConstraintKey = tuple[int, Hashable]  # (group, constraint index within group)

REL_TOL = 1e-9
ABS_TOL = 1e-12

#: Worst-case fraction of the optimum achieved by the better of the two
#: greedy strategies on a feasible monotone submodular instance.
GREEDY_GUARANTEE = 0.5 * (1.0 - math.exp(-1.0))


class InstanceError(ValueError):
    """Malformed instance: bad cost vector, missing budget, bad weights."""


class InstanceTooLargeError(RuntimeError):
    """Exhaustive search refused because the state space exceeds the limit."""


def values_close(a: float, b: float) -> bool:
    """Equality under the package-wide tolerance (1e-9 relative, 1e-12 floor)."""
    return abs(a - b) <= max(REL_TOL * max(abs(a), abs(b)), ABS_TOL)


@dataclass(frozen=True)
class CostVector:
    """Per-element resource consumption, at most one constraint per group.

    ``entries`` holds ``(group, key, amount)`` triples.  Groups are numbered
    from 1; the key identifies one constraint inside the group and can be
    any hashable (ints or tuples in practice).  Amounts must be >= 0.
    """

    entries: tuple[tuple[int, Hashable, float], ...]

    def __post_init__(self):
        seen = set()
        for group, key, amount in self.entries:
            if group < 1:
                raise InstanceError(f"cost group must be >= 1, got {group}")
            if amount < 0:
                raise InstanceError(f"negative cost amount {amount} on {(group, key)}")
            if group in seen:
                raise InstanceError(f"element touches two constraints in group {group}")
            seen.add(group)

    def constraints(self) -> tuple[ConstraintKey, ...]:
        return tuple((g, k) for g, k, _ in self.entries)

    def group_cost(self, group: int) -> float:
        for g, _, amount in self.entries:
            if g == group:
                return amount
        return 0.0


@dataclass(frozen=True)
class BudgetSet:
    """Budget per constraint, keyed by ``(group, key)``."""

    budgets: dict[ConstraintKey, float]

    def __post_init__(self):
        for ck, h in self.budgets.items():
            if h < 0:
                raise InstanceError(f"negative budget {h} on constraint {ck}")

    def limit(self, ck: ConstraintKey) -> float:
        return self.budgets[ck]


class SetFunction:
    """Value oracle contract: nonnegative, queried read-only.

    ``marginal`` defaults to two evaluate calls; subclasses may override it
    with something faster as long as the two stay consistent to 1e-9.
    """

    def evaluate(self, selected: frozenset[ElementId]) -> float:
        raise NotImplementedError

    def marginal(self, selected: frozenset[ElementId], element: ElementId) -> float:
        return self.evaluate(selected | {element}) - self.evaluate(selected)


@dataclass(frozen=True)
class GreedyConfig:
    """Weights for the cost-benefit score, one per cost group.

    Ties in either greedy score are always broken toward the lowest element
    id.  Groups in which an element has zero total cost are skipped and the
    remaining weights renormalized for that element's score.
    """

    weights: tuple[float, ...]
    lazy: bool = True

    def __post_init__(self):
        if not self.weights or any(w < 0 for w in self.weights):
            raise InstanceError("weights must be nonnegative and nonempty")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise InstanceError(f"weights must sum to 1, got {sum(self.weights)}")


@dataclass(frozen=True)
class Pick:
    element: ElementId
    gain: float
    accepted: bool
    rejected_constraint: ConstraintKey | None = None


@dataclass
class SolutionTrace:
    picks: list[Pick]
    final_value: float
    final_costs: dict[ConstraintKey, float]

    def accepted(self) -> frozenset[ElementId]:
        return frozenset(p.element for p in self.picks if p.accepted)

    def to_lines(self) -> list[str]:
        """One pick per line: id, gain, accepted flag, rejecting constraint."""
        lines = []
        for p in self.picks:
            reject = "-" if p.rejected_constraint is None else repr(p.rejected_constraint)
            lines.append(f"{p.element}\t{p.gain!r}\t{int(p.accepted)}\t{reject}")
        return lines


def validate_instance(
    ground: Iterable[ElementId],
    costs: dict[ElementId, CostVector],
    budgets: BudgetSet,
) -> None:
    """Raise InstanceError before any oracle query if the instance is malformed."""
    for e in ground:
        cv = costs.get(e)
        if cv is None:
            raise InstanceError(f"element {e} has no cost vector")
        for ck in cv.constraints():
            if ck not in budgets.budgets:
                raise InstanceError(f"element {e} references unbudgeted constraint {ck}")


def _fits(
    usage: dict[ConstraintKey, float], cv: CostVector, budgets: BudgetSet
) -> tuple[bool, ConstraintKey | None]:
    """Whether adding ``cv`` keeps every touched constraint within budget.

    Returns the first violated constraint in the vector's group order.
    """
    for group, key, amount in cv.entries:
        ck = (group, key)
        limit = budgets.limit(ck)
        if usage.get(ck, 0.0) + amount > limit + 1e-12 * max(1.0, abs(limit)):
            return False, ck
    return True, None


def _charge(usage: dict[ConstraintKey, float], cv: CostVector) -> None:
    for group, key, amount in cv.entries:
        ck = (group, key)
        usage[ck] = usage.get(ck, 0.0) + amount


def wcb_score_factor(cv: CostVector, weights: Sequence[float]) -> float:
    """Gain multiplier for the weighted cost-benefit score of one element.

    sum_i lambda_i / h_i over groups with positive cost, with the lambdas
    renormalized over those groups.  Raises if every group cost is zero.
    """
    active = [(g, a) for g, _, a in cv.entries if a > 0.0]
    if not active:
        raise InstanceError("element has zero cost in every group; score undefined")
    wsum = sum(weights[g - 1] for g, _ in active)
    if wsum <= 0.0:
        raise InstanceError("all weights on an element's nonzero-cost groups are zero")
    return sum(weights[g - 1] / wsum / a for g, a in active)


def _greedy(
    ground: Iterable[ElementId],
    oracle: SetFunction,
    costs: dict[ElementId, CostVector],
    budgets: BudgetSet,
    factors: dict[ElementId, float],
    lazy: bool,
) -> SolutionTrace:
    """Shared accept-or-discard greedy loop.

    Each round the surviving element with the highest score (marginal gain
    times its fixed factor) is examined; it is added when its cost still
    fits every budget and is removed from the pool forever otherwise.  Ties
    go to the lowest element id, which makes the run deterministic.  The
    lazy path keeps stale scores in a max-heap and re-evaluates an entry
    before acting on it, which yields the identical pick sequence whenever
    gains are non-increasing (submodularity).
    """
    order = sorted(ground)
    validate_instance(order, costs, budgets)
    selected: frozenset[ElementId] = frozenset()
    usage: dict[ConstraintKey, float] = {}
    picks: list[Pick] = []

    if lazy:
        version = 0
        heap: list[tuple[float, ElementId, int, float]] = []
        for e in order:
            gain = oracle.marginal(selected, e)
            heap.append((-gain * factors[e], e, version, gain))
        heapq.heapify(heap)
        while heap:
            _, e, stamp, gain = heapq.heappop(heap)
            if stamp != version:
                gain = oracle.marginal(selected, e)
                heapq.heappush(heap, (-gain * factors[e], e, version, gain))
                continue
            ok, violated = _fits(usage, costs[e], budgets)
            if ok:
                picks.append(Pick(e, gain, True))
                selected = selected | {e}
                _charge(usage, costs[e])
                version += 1
            else:
                picks.append(Pick(e, gain, False, violated))
    else:
        pool = list(order)
        while pool:
            best_e = None
            best_score = -math.inf
            best_gain = 0.0
            for e in pool:  # ascending id: strict > keeps the lowest id on ties
                gain = oracle.marginal(selected, e)
                score = gain * factors[e]
                if score > best_score:
                    best_e, best_score, best_gain = e, score, gain
            ok, violated = _fits(usage, costs[best_e], budgets)
            if ok:
                picks.append(Pick(best_e, best_gain, True))
                selected = selected | {best_e}
                _charge(usage, costs[best_e])
            else:
                picks.append(Pick(best_e, best_gain, False, violated))
            pool.remove(best_e)

    return SolutionTrace(picks, oracle.evaluate(selected), usage)


def uc_greedy(
    ground: Iterable[ElementId],
    oracle: SetFunction,
    costs: dict[ElementId, CostVector],
    budgets: BudgetSet,
    lazy: bool = True,
) -> SolutionTrace:
    """Uniform-cost greedy: best marginal gain, discard what does not fit."""
    order = sorted(ground)
    return _greedy(order, oracle, costs, budgets, {e: 1.0 for e in order}, lazy)


def wcb_greedy(
    ground: Iterable[ElementId],
    oracle: SetFunction,
    costs: dict[ElementId, CostVector],
    budgets: BudgetSet,
    config: GreedyConfig,
) -> SolutionTrace:
    """Weighted cost-benefit greedy: best weighted gain-to-cost ratio sum."""
    order = sorted(ground)
    validate_instance(order, costs, budgets)
    factors = {e: wcb_score_factor(costs[e], config.weights) for e in order}
    return _greedy(order, oracle, costs, budgets, factors, config.lazy)


def _exclusive_classes(
    order: list[ElementId],
    costs: dict[ElementId, CostVector],
    budgets: BudgetSet,
) -> list[list[ElementId]]:
    """Partition elements into groups of which at most one can be selected.

    A constraint whose every toucher costs more than half its budget admits
    at most one of them; each element joins the first such constraint it
    touches.  Elements in no such constraint become singleton classes
    (plain include/exclude branching).
    """
    touching: dict[ConstraintKey, list[ElementId]] = {}
    for e in order:
        for ck in costs[e].constraints():
            touching.setdefault(ck, []).append(e)
    assigned: dict[ElementId, ConstraintKey] = {}
    for ck in sorted(touching, key=repr):
        members = touching[ck]
        if len(members) < 2:
            continue
        limit = budgets.limit(ck)
        if all(costs[e].group_cost(ck[0]) > limit / 2.0 for e in members):
            for e in members:
                assigned.setdefault(e, ck)
    classes: dict[ConstraintKey, list[ElementId]] = {}
    singletons: list[list[ElementId]] = []
    for e in order:
        ck = assigned.get(e)
        if ck is None:
            singletons.append([e])
        else:
            classes.setdefault(ck, []).append(e)
    out = list(classes.values()) + singletons
    out.sort(key=lambda members: members[0])
    return out


def estimate_search_space(
    ground: Iterable[ElementId],
    costs: dict[ElementId, CostVector],
    budgets: BudgetSet,
) -> float:
    """Upper bound on the number of feasible partial states explored."""
    order = sorted(ground)
    size = 1.0
    for members in _exclusive_classes(order, costs, budgets):
        size *= len(members) + 1
    return size


def exhaustive_optimum(
    ground: Iterable[ElementId],
    oracle: SetFunction,
    costs: dict[ElementId, CostVector],
    budgets: BudgetSet,
    limit: float = 1e7,
    warm_start: frozenset[ElementId] | None = None,
) -> tuple[frozenset[ElementId], float]:
    """Feasible value maximizer by depth-first enumeration with pruning.

    Branches class by class (see ``_exclusive_classes``) in canonical order.
    A branch is cut when the current value plus the sum over remaining
    classes of the best single-element marginal from the current set cannot
    beat the incumbent; that bound is sound for monotone submodular
    oracles.  Refuses instances whose estimated state space exceeds
    ``limit`` instead of returning a silent heuristic answer.
    """
    order = sorted(ground)
    validate_instance(order, costs, budgets)
    estimate = estimate_search_space(order, costs, budgets)
    if estimate > limit:
        raise InstanceTooLargeError(
            f"instance too large for exhaustive search: ~{estimate:.3g} states > limit {limit:.3g}"
        )

    classes = _exclusive_classes(order, costs, budgets)
    empty = frozenset()
    best_value = oracle.evaluate(empty)
    best_set = empty
    if warm_start is not None:
        usage: dict[ConstraintKey, float] = {}
        ok = True
        for e in sorted(warm_start):
            fits, _ = _fits(usage, costs[e], budgets)
            if not fits:
                ok = False
                break
            _charge(usage, costs[e])
        if ok:
            v = oracle.evaluate(frozenset(warm_start))
            if v > best_value:
                best_value, best_set = v, frozenset(warm_start)

    marginal_cache: dict[tuple[frozenset[ElementId], ElementId], float] = {}

    def marginal(sel: frozenset[ElementId], e: ElementId) -> float:
        key = (sel, e)
        got = marginal_cache.get(key)
        if got is None:
            got = oracle.marginal(sel, e)
            marginal_cache[key] = got
        return got

    def descend(idx: int, sel: frozenset[ElementId], value: float, usage: dict) -> None:
        nonlocal best_value, best_set
        if value > best_value:
            best_value, best_set = value, sel
        if idx == len(classes):
            return
        bound = value
        for members in classes[idx:]:
            feasible_gain = 0.0
            for e in members:
                if e in sel:
                    continue
                ok, _ = _fits(usage, costs[e], budgets)
                if ok:
                    g = marginal(sel, e)
                    if g > feasible_gain:
                        feasible_gain = g
            bound += feasible_gain
        if bound <= best_value + ABS_TOL:
            return
        for e in classes[idx]:
            ok, _ = _fits(usage, costs[e], budgets)
            if not ok:
                continue
            _charge(usage, costs[e])
            descend(idx + 1, sel | {e}, value + marginal(sel, e), usage)
            for group, key, amount in costs[e].entries:
                usage[(group, key)] -= amount
        descend(idx + 1, sel, value, usage)

    descend(0, empty, oracle.evaluate(empty), {})
    return best_set, best_value


@dataclass(frozen=True)
class ProbeReport:
    trials: int
    violations: int
    max_violation: float
    seed: int

    @property
    def clean(self) -> bool:
        return self.violations == 0


def _sample_chain(
    rng: random.Random, order: list[ElementId]
) -> tuple[frozenset[ElementId], frozenset[ElementId]]:
    """Random nested pair Z1 subset-of Z2, with Z2 a strict subset of the ground."""
    n2 = rng.randint(0, len(order) - 1)
    z2 = rng.sample(order, n2)
    n1 = rng.randint(0, len(z2))
    z1 = rng.sample(z2, n1)
    return frozenset(z1), frozenset(z2)


def submodularity_probe(
    oracle: SetFunction, ground: Iterable[ElementId], trials: int, rng_seed: int
) -> ProbeReport:
    """Sampled check of diminishing returns; evidence, not proof.

    Draws nested sets Z1 in Z2 and an outside element w, and flags a
    violation when marginal(Z1, w) < marginal(Z2, w) beyond tolerance.
    """
    order = sorted(ground)
    if len(order) < 2:
        raise InstanceError("submodularity probe needs at least 2 elements")
    if trials < 1:
        raise InstanceError("trials must be >= 1")
    rng = random.Random(rng_seed)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        z1, z2 = _sample_chain(rng, order)
        outside = [e for e in order if e not in z2]
        w = rng.choice(outside)
        m1 = oracle.marginal(z1, w)
        m2 = oracle.marginal(z2, w)
        tol = max(REL_TOL * max(abs(m1), abs(m2)), ABS_TOL)
        if m1 < m2 - tol:
            violations += 1
            worst = max(worst, m2 - m1)
    return ProbeReport(trials, violations, worst, rng_seed)


def monotonicity_probe(
    oracle: SetFunction, ground: Iterable[ElementId], trials: int, rng_seed: int
) -> ProbeReport:
    """Sampled check that the oracle never loses value on nested sets."""
    order = sorted(ground)
    if len(order) < 2:
        raise InstanceError("monotonicity probe needs at least 2 elements")
    if trials < 1:
        raise InstanceError("trials must be >= 1")
    rng = random.Random(rng_seed)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        z1, z2 = _sample_chain(rng, order)
        v1 = oracle.evaluate(z1)
        v2 = oracle.evaluate(z2)
        tol = max(REL_TOL * max(abs(v1), abs(v2)), ABS_TOL)
        if v1 > v2 + tol:
            violations += 1
            worst = max(worst, v1 - v2)
    return ProbeReport(trials, violations, worst, rng_seed)


class CardinalitySquared(SetFunction):
    """g(S) = |S|^2, strictly supermodular: a control the probes must catch."""

    def evaluate(self, selected: frozenset[ElementId]) -> float:
        return float(len(selected) ** 2)


@dataclass(frozen=True)
class EngineInstance:
    """A ready-to-solve bundle: canonicalized ground set plus oracle and costs."""

    ground: tuple[ElementId, ...]
    oracle: SetFunction
    costs: dict[ElementId, CostVector]
    budgets: BudgetSet
    weights: tuple[float, ...] = (0.2, 0.5, 0.3)


@dataclass(frozen=True)
class ApproximationReport:
    uc_value: float
    wcb_value: float
    best_value: float
    opt_value: float
    ratio: float
    guarantee: float
    satisfied: bool
    seed: int | None = None


def approximation_report(
    instance: EngineInstance, rng_seed: int | None = None, limit: float = 1e7
) -> ApproximationReport:
    """Run both greedy strategies and the exhaustive search, report the ratio.

    When the optimum is zero the ratio is 1 by convention: a monotone
    oracle started from the empty set cannot give the greedy less than an
    all-zero optimum.
    """
    uc = uc_greedy(instance.ground, instance.oracle, instance.costs, instance.budgets)
    wcb = wcb_greedy(
        instance.ground,
        instance.oracle,
        instance.costs,
        instance.budgets,
        GreedyConfig(instance.weights),
    )
    best = max(uc.final_value, wcb.final_value)
    warm = uc.accepted() if uc.final_value >= wcb.final_value else wcb.accepted()
    _, opt = exhaustive_optimum(
        instance.ground,
        instance.oracle,
        instance.costs,
        instance.budgets,
        limit=limit,
        warm_start=warm,
    )
    ratio = 1.0 if opt <= ABS_TOL else best / opt
    return ApproximationReport(
        uc_value=uc.final_value,
        wcb_value=wcb.final_value,
        best_value=best,
        opt_value=opt,
        ratio=ratio,
        guarantee=GREEDY_GUARANTEE,
        satisfied=ratio > GREEDY_GUARANTEE - REL_TOL,
        seed=rng_seed,
    )
