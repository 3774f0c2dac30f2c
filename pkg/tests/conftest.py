import random

import pytest

from mvsched.scenario import ScenarioParams, build_scenario


def micro_params(**overrides) -> ScenarioParams:
    """Smallest sensible scenario: 1 SBS, 2 users, 4 cameras, 1 slot."""
    base = dict(
        num_sbs=1,
        num_users=2,
        mbs_radius_m=100.0,
        sbs_radius_m=100.0,
        mbs_rate_mbps=4.0,
        sbs_rate_mbps=4.0,
        sbs_cache_bytes=500000.0,
        cache_fraction=None,
        anchor_count=4,
        virtual_per_gap=1,
        num_slots=1,
    )
    base.update(overrides)
    return ScenarioParams(**base)


@pytest.fixture
def micro_scenario():
    return build_scenario(micro_params(), rng_seed=0)


@pytest.fixture
def rng():
    return random.Random(12345)
