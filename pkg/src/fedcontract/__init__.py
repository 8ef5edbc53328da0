"""Contract-menu design and verification for federated-learning data markets.

A task publisher buys model updates from mobile data owners whose data
quality it cannot observe.  This package computes the profit-maximal menu of
(CPU frequency, reward) contract items, audits any menu for participation,
truth-telling, deadline, and budget feasibility, and benchmarks the menu
against classical Stackelberg pricing under both complete and hidden
information.
"""

from .backend import backend_name
from .costmodel import (
    ContractItem,
    SystemParams,
    TypeProfile,
    communication_energy,
    computation_energy,
    computation_time,
    effective_comm_energy,
    effective_comm_time,
    iteration_ratio,
    local_iterations,
    owner_utility,
    publisher_profit_one,
    total_iteration_energy,
    total_iteration_time,
    transmission_rate,
    transmission_time,
    type_from_quality,
)
from .errors import (
    BudgetInfeasibleError,
    ConfigError,
    ConvergenceError,
    DegenerateMarketError,
    FedContractError,
    InfeasibleTimeError,
)
from .feasibility import (
    FeasibilityReport,
    OracleResult,
    brute_force_solve,
    check_ic,
    check_ir,
    feasibility_report,
    grid_resolution_bound,
    publisher_total_profit,
    utility_matrix,
)
from .simulator import (
    ScenarioConfig,
    ScenarioReport,
    accuracy_sweep,
    build_types,
    owner_select_item,
    run_scenario,
    type_count_sweep,
)
from .solver import (
    ContractMenu,
    g_coefficients,
    iron_monotonicity,
    recover_rewards,
    reduced_objective,
    solve,
    solve_stationary,
)
from .stackelberg import (
    StackelbergOutcome,
    expected_profit_at_price,
    follower_response,
    solve_asymmetric,
    solve_symmetric,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetInfeasibleError",
    "ConfigError",
    "ContractItem",
    "ContractMenu",
    "ConvergenceError",
    "DegenerateMarketError",
    "FeasibilityReport",
    "FedContractError",
    "InfeasibleTimeError",
    "OracleResult",
    "ScenarioConfig",
    "ScenarioReport",
    "StackelbergOutcome",
    "SystemParams",
    "TypeProfile",
    "accuracy_sweep",
    "backend_name",
    "brute_force_solve",
    "build_types",
    "check_ic",
    "check_ir",
    "communication_energy",
    "computation_energy",
    "computation_time",
    "effective_comm_energy",
    "effective_comm_time",
    "expected_profit_at_price",
    "feasibility_report",
    "follower_response",
    "g_coefficients",
    "grid_resolution_bound",
    "iron_monotonicity",
    "iteration_ratio",
    "local_iterations",
    "owner_select_item",
    "owner_utility",
    "publisher_profit_one",
    "publisher_total_profit",
    "recover_rewards",
    "reduced_objective",
    "run_scenario",
    "solve",
    "solve_asymmetric",
    "solve_stationary",
    "solve_symmetric",
    "total_iteration_energy",
    "total_iteration_time",
    "transmission_rate",
    "transmission_time",
    "type_from_quality",
    "utility_matrix",
]
