"""Average expected distortion-reduction objective and its reference twin.

The objective of a policy is the per-user, per-slot average over all grid
viewpoints of ``p * (d_max - d)``: popularity-weighted distortion
reduction against the ceiling.  Only which (user, slot, view) deliveries
a policy induces matters, so evaluation decomposes per (user, slot) into
a value of the delivered anchor set, which is memoized -- the number of
distinct delivered sets is tiny ``(2^(V-2) per slot)``.

``xy_formulation_value`` re-derives the average expected distortion from
the raw binary placement/scheduling variables with the indicator-product
form written out literally.  It shares nothing with the nearest-pair
shortcut and exists as an independent cross-check: for any policy,
objective value + average distortion must equal the ceiling ``d_max``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .engine import InstanceError, SetFunction
from .ground import GroundElement, validate_element
from .scenario import Scenario
from .views import synth_distortion, viewpoint_distortions


class DeliveryOracle(SetFunction):
    """Distortion-reduction value of subsets of an indexed element list."""

    def __init__(self, scenario: Scenario, elements: Sequence[GroundElement]):
        self.scenario = scenario
        self.elements = tuple(elements)
        grid = scenario.grid
        self._mandatory = frozenset({grid.first_anchor, grid.last_anchor})
        self._num_users = scenario.num_users
        self._num_slots = scenario.num_slots
        self._inv = 1.0 / (self._num_users * self._num_slots)
        self._val_cache: dict[tuple[frozenset[int], int], float] = {}
        self._delivery_cache: dict[frozenset[int], tuple[frozenset[int], ...]] = {}

    def _slot_value(self, delivered: frozenset[int], t: int) -> float:
        """Sum over viewpoints of popularity-weighted reduction, one (u,t) cell."""
        key = (delivered, t)
        got = self._val_cache.get(key)
        if got is None:
            dist = viewpoint_distortions(self.scenario.model, delivered)
            probs = self.scenario.popularity.probs
            d_max = self.scenario.model.d_max
            got = float(sum((d_max - d) * probs[k, t] for k, d in dist.items()))
            self._val_cache[key] = got
        return got

    def _delivery(self, selected: frozenset[int]) -> tuple[frozenset[int], ...]:
        """Delivered anchor set per (user, slot) cell, mandatory views included."""
        got = self._delivery_cache.get(selected)
        if got is None:
            cells: list[set[int]] = [
                set(self._mandatory) for _ in range(self._num_users * self._num_slots)
            ]
            for i in selected:
                e = self.elements[i]
                for u in e.users:
                    cells[u * self._num_slots + e.slot].add(e.view)
            got = tuple(frozenset(c) for c in cells)
            if len(self._delivery_cache) > 200_000:
                self._delivery_cache.clear()
            self._delivery_cache[selected] = got
        return got

    def evaluate(self, selected: frozenset[int]) -> float:
        cells = self._delivery(selected)
        total = 0.0
        for u in range(self._num_users):
            for t in range(self._num_slots):
                total += self._slot_value(cells[u * self._num_slots + t], t)
        return total * self._inv

    def marginal(self, selected: frozenset[int], element: int) -> float:
        if element in selected:
            return 0.0
        cells = self._delivery(selected)
        e = self.elements[element]
        delta = 0.0
        for u in e.users:
            cell = cells[u * self._num_slots + e.slot]
            if e.view in cell:
                continue
            delta += self._slot_value(cell | {e.view}, e.slot) - self._slot_value(
                cell, e.slot
            )
        return delta * self._inv


def validate_policy(scenario: Scenario, elements: Iterable[GroundElement]) -> None:
    """Well-formed elements, and one element at most per (station, view, slot)."""
    seen = set()
    for e in elements:
        validate_element(scenario, e)
        key = (e.bs, e.view, e.slot)
        if key in seen:
            raise InstanceError(f"two elements place the same segment at {key}")
        seen.add(key)


def delivered_views(
    scenario: Scenario, elements: Iterable[GroundElement]
) -> dict[tuple[int, int], frozenset[int]]:
    """Anchor views reaching each (user, slot), the mandatory extremes included."""
    grid = scenario.grid
    base = {grid.first_anchor, grid.last_anchor}
    cells = {
        (u, t): set(base)
        for u in range(scenario.num_users)
        for t in range(scenario.num_slots)
    }
    for e in elements:
        for u in e.users:
            cells[(u, e.slot)].add(e.view)
    return {k: frozenset(v) for k, v in cells.items()}


def policy_value(scenario: Scenario, elements: Iterable[GroundElement]) -> float:
    """Average expected distortion reduction of a policy (validated)."""
    elements = tuple(elements)
    validate_policy(scenario, elements)
    oracle = DeliveryOracle(scenario, elements)
    return oracle.evaluate(frozenset(range(len(elements))))


def empty_policy_value(scenario: Scenario) -> float:
    """Objective of the mandatory-only policy: the floor every run starts from."""
    return policy_value(scenario, ())


def xy_formulation_value(scenario: Scenario, elements: Iterable[GroundElement]) -> float:
    """Average expected distortion from the raw binary-variable formulation.

    Builds the placement variables x[station][view][slot] and scheduling
    variables y[station][user][view][slot] induced by the policy, then
    evaluates the distortion of every (user, slot, viewpoint) cell with
    the literal double sum over anchor pairs and indicator products, and
    averages with the popularity weights.  Deliberately naive.
    """
    elements = tuple(elements)
    validate_policy(scenario, elements)
    grid = scenario.grid
    anchors = grid.anchor_grid_indices()
    pos = {k: grid.position(k) for k in range(grid.size)}
    n_bs = scenario.num_sbs + 1
    x = {(n, v, t): 0 for n in range(1, n_bs) for v in anchors for t in range(scenario.num_slots)}
    y: dict[tuple[int, int, int, int], int] = {}
    for t in range(scenario.num_slots):
        for u in range(scenario.num_users):
            y[(0, u, grid.first_anchor, t)] = 1
            y[(0, u, grid.last_anchor, t)] = 1
    for e in elements:
        if e.bs != 0:
            x[(e.bs, e.view, e.slot)] = 1
        for u in e.users:
            y[(e.bs, u, e.view, e.slot)] = 1
    for (n, u, v, t), flag in y.items():
        if flag and n != 0 and x[(n, v, t)] != 1:
            raise InstanceError("scheduled segment is not cached at its station")

    def got(u: int, v: int, t: int) -> bool:
        stations = scenario.coverage.bs_of_user[u]
        return any(y.get((n, u, v, t), 0) for n in stations)

    total = 0.0
    probs = scenario.popularity.probs
    for u in range(scenario.num_users):
        for t in range(scenario.num_slots):
            for k in range(grid.size):
                if grid.is_anchor(k) and got(u, k, t):
                    continue  # delivered camera view: zero distortion
                d = 0.0
                for vl in anchors:
                    if pos[vl] >= pos[k]:
                        continue
                    for vr in anchors:
                        if pos[vr] <= pos[k]:
                            continue
                        term = synth_distortion(
                            pos[k], pos[vl], pos[vr],
                            scenario.model.gamma,
                            scenario.model.alpha[k],
                            scenario.model.beta[k],
                        )
                        term *= 1 if got(u, vl, t) else 0
                        for mid in anchors:
                            if pos[vl] < pos[mid] < pos[k]:
                                term *= 0 if got(u, mid, t) else 1
                        term *= 1 if got(u, vr, t) else 0
                        for mid in anchors:
                            if pos[k] < pos[mid] < pos[vr]:
                                term *= 0 if got(u, mid, t) else 1
                        d += term
                total += d * float(probs[k, t])
    return total / (scenario.num_users * scenario.num_slots)
