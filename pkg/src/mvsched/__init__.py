"""Joint cache placement and delivery scheduling for interactive multiview
streaming over a heterogeneous cellular network, built on greedy submodular
maximization under separable knapsack budgets."""

__version__ = "0.1.0"

from .engine import (  # noqa: F401
    ApproximationReport,
    BudgetSet,
    CostVector,
    EngineInstance,
    GreedyConfig,
    GREEDY_GUARANTEE,
    InstanceError,
    InstanceTooLargeError,
    Pick,
    ProbeReport,
    SetFunction,
    SolutionTrace,
    approximation_report,
    exhaustive_optimum,
    monotonicity_probe,
    submodularity_probe,
    uc_greedy,
    wcb_greedy,
)
from .ground import GroundElement, budget_set, candidate_pool, cost_vector  # noqa: F401
from .joint import JointTrace, joint_optimize, replacement_feasibility  # noqa: F401
from .oracle import (  # noqa: F401
    DeliveryOracle,
    delivered_views,
    empty_policy_value,
    policy_value,
    xy_formulation_value,
)
from .popularity import PopularityTable, popularity_table  # noqa: F401
from .scenario import (  # noqa: F401
    CellTopology,
    CoverageSets,
    Scenario,
    ScenarioParams,
    TopologyParams,
    build_scenario,
    coverage_sets,
    generate_topology,
    load_topology,
    save_topology,
    validate_scenario,
)
from .views import DistortionModel, ViewGrid, synth_distortion  # noqa: F401
