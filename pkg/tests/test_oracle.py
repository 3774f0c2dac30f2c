import random

import pytest

from mvsched.engine import InstanceError
from mvsched.ground import GroundElement, exhaustive_ground
from mvsched.oracle import (
    DeliveryOracle,
    delivered_views,
    empty_policy_value,
    policy_value,
    validate_policy,
    xy_formulation_value,
)
from mvsched.scenario import build_scenario

from conftest import micro_params


def build_tiny(seed=0, **overrides):
    return build_scenario(micro_params(**overrides), rng_seed=seed)


def random_policy(scenario, rng, density=0.3):
    """Random uniqueness-respecting subset of the exhaustive ground."""
    chosen = {}
    for e in exhaustive_ground(scenario):
        key = (e.bs, e.view, e.slot)
        if rng.random() < density:
            chosen.setdefault(key, []).append(e)
    return tuple(rng.choice(group) for group in chosen.values())


def test_empty_policy_matches_direct_formula():
    scenario = build_tiny()
    grid, model = scenario.grid, scenario.model
    expected = 0.0
    lo, hi = grid.first_anchor, grid.last_anchor
    for t in range(scenario.num_slots):
        for k in range(grid.size):
            d = 0.0 if k in (lo, hi) else model.distortion(k, lo, hi)
            expected += (model.d_max - d) * float(scenario.popularity.probs[k, t])
    expected /= scenario.num_slots  # same for every user
    v0 = empty_policy_value(scenario)
    assert v0 == pytest.approx(expected, rel=1e-12)
    assert v0 > 0.0


def test_adding_elements_never_decreases_value():
    scenario = build_tiny(num_users=3, num_sbs=2)
    rng = random.Random(5)
    for _ in range(40):
        policy = list(random_policy(scenario, rng))
        value = policy_value(scenario, policy)
        pool = [e for e in exhaustive_ground(scenario) if e not in policy]
        extra = rng.choice(pool)
        taken = {(e.bs, e.view, e.slot) for e in policy}
        if (extra.bs, extra.view, extra.slot) in taken:
            continue
        grown = policy_value(scenario, policy + [extra])
        assert grown >= value - 1e-12


def test_uniqueness_violation_rejected():
    scenario = build_tiny()
    policy = [GroundElement(1, 2, 0, (0,)), GroundElement(1, 2, 0, (1,))]
    with pytest.raises(InstanceError):
        policy_value(scenario, policy)
    with pytest.raises(InstanceError):
        validate_policy(scenario, policy)


def test_delivered_views_definition():
    scenario = build_tiny(num_users=3)
    policy = (GroundElement(0, 2, 0, (0, 2)),)
    got = delivered_views(scenario, policy)
    grid = scenario.grid
    base = {grid.first_anchor, grid.last_anchor}
    assert got[(0, 0)] == frozenset(base | {2})
    assert got[(1, 0)] == frozenset(base)
    assert got[(2, 0)] == frozenset(base | {2})


def test_oracle_marginal_consistency():
    scenario = build_tiny(num_users=3, num_sbs=2, num_slots=1)
    elements = exhaustive_ground(scenario)
    oracle = DeliveryOracle(scenario, elements)
    rng = random.Random(77)
    n = len(elements)
    for _ in range(1000):
        size = rng.randint(0, min(8, n - 1))
        sel = frozenset(rng.sample(range(n), size))
        e = rng.choice([i for i in range(n) if i not in sel])
        direct = oracle.evaluate(sel | {e}) - oracle.evaluate(sel)
        fast = oracle.marginal(sel, e)
        assert fast == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_set_and_xy_formulations_complement_to_ceiling():
    rng = random.Random(13)
    for seed in range(6):
        scenario = build_tiny(seed=seed, num_users=3, num_sbs=2)
        for _ in range(5):
            policy = random_policy(scenario, rng)
            set_value = policy_value(scenario, policy)
            avg_distortion = xy_formulation_value(scenario, policy)
            total = set_value + avg_distortion
            assert total == pytest.approx(scenario.model.d_max, rel=1e-9)


def test_xy_coupling_constraint_enforced():
    scenario = build_tiny()
    # an SBS delivery implies the segment is cached there, by construction of
    # the element; a hand-built inconsistent policy cannot be expressed, so
    # check the xy evaluator accepts every valid policy shape instead
    policy = (GroundElement(1, 2, 0, (0,)), GroundElement(0, 4, 0, (0, 1)))
    value = xy_formulation_value(scenario, policy)
    assert value >= 0.0
