"""Independent verification of contract menus.

Everything here checks menus the direct way — per-type utilities, explicit
deadline slack, the literal reward bill — on purpose avoiding the solver's
reduced frequency-only form, so the two code paths can vouch for each other.
The module also carries a brute-force grid oracle that re-derives the optimal
menu by exhaustive enumeration, which pins down the solver's answers in tests
to within a computable grid-resolution bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import backend
from .costmodel import (
    ContractItem,
    SystemParams,
    TypeProfile,
    effective_comm_energy,
    effective_comm_time,
    owner_utility,
    publisher_profit_one,
    total_iteration_time,
)
from .errors import BudgetInfeasibleError, ConvergenceError
from .solver import recover_rewards


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of every menu sanity check, with the tightest slacks."""

    ir_ok: bool
    ic_ok: bool
    monotone_ok: bool
    time_ok: bool
    budget_ok: bool
    lowest_surplus: float
    ic_slack: float
    bottom_surplus: float
    ldic_max_abs_gap: float
    budget_spent: float
    expected_profit: float

    @property
    def ok(self) -> bool:
        return self.ir_ok and self.ic_ok and self.monotone_ok and self.time_ok and self.budget_ok


@dataclass(frozen=True)
class OracleResult:
    """Best menu found by exhaustive grid search."""

    freqs: np.ndarray
    rewards: np.ndarray
    expected_profit: float
    budget_spent: float
    grid: np.ndarray


def utility_matrix(
    items: Sequence[ContractItem], profiles: Sequence[TypeProfile], params: SystemParams
) -> np.ndarray:
    """Owner utilities for every (true type, chosen item) pair.

    Entry ``[n, k]`` is what a type-``n`` owner gets from signing item ``k``.
    """
    if len(items) != len(profiles):
        raise ValueError("need exactly one menu item per type profile")
    return np.array(
        [[owner_utility(profile, item, params) for item in items] for profile in profiles]
    )


def check_ir(
    items: Sequence[ContractItem],
    profiles: Sequence[TypeProfile],
    params: SystemParams,
    tol: float = 1e-9,
) -> tuple[bool, np.ndarray]:
    """Participation check: every type's own item must not lose it money.

    Returns the verdict and the per-type surplus vector.
    """
    surplus = np.diagonal(utility_matrix(items, profiles, params)).copy()
    return bool(np.all(surplus >= -tol)), surplus


def check_ic(
    items: Sequence[ContractItem],
    profiles: Sequence[TypeProfile],
    params: SystemParams,
    tol: float = 1e-9,
) -> tuple[bool, np.ndarray]:
    """Truth-telling check: no type may prefer another type's item.

    Returns the verdict and the full utility matrix it was judged on.
    """
    matrix = utility_matrix(items, profiles, params)
    own = np.diagonal(matrix)
    best_other = matrix.max(axis=1)
    return bool(np.all(own >= best_other - tol)), matrix


def publisher_total_profit(
    items: Sequence[ContractItem], profiles: Sequence[TypeProfile], params: SystemParams
) -> float:
    """Expected publisher profit of a menu, summed type by type."""
    if len(items) != len(profiles):
        raise ValueError("need exactly one menu item per type profile")
    return params.population * sum(
        profile.probability * publisher_profit_one(profile, item, params)
        for profile, item in zip(profiles, items)
    )


def feasibility_report(
    items: Sequence[ContractItem],
    profiles: Sequence[TypeProfile],
    params: SystemParams,
    tol: float = 1e-9,
) -> FeasibilityReport:
    """Run every menu check and collect the slacks into one report."""
    if len(items) != len(profiles):
        raise ValueError("need exactly one menu item per type profile")
    matrix = utility_matrix(items, profiles, params)
    own = np.diagonal(matrix)
    ir_ok = bool(np.all(own >= -tol))
    ic_ok = bool(np.all(own >= matrix.max(axis=1) - tol))
    ic_slack = float(np.min(own - matrix.max(axis=1)))

    freqs = np.array([item.cpu_freq for item in items])
    rewards = np.array([item.reward for item in items])
    monotone_ok = bool(
        np.all(np.diff(freqs) >= -1e-12 * freqs[:-1])
        and np.all(np.diff(rewards) >= -1e-12 * np.maximum(rewards[:-1], 1.0))
    )

    times = np.array(
        [total_iteration_time(profile, item, params) for profile, item in zip(profiles, items)]
    )
    time_ok = bool(np.all(times < params.t_max))

    shares = np.array([profile.probability for profile in profiles])
    spent = params.population * float(np.dot(shares, rewards))
    budget_ok = spent <= params.r_max * (1.0 + 1e-9)

    if len(items) > 1:
        ldic = float(np.max(np.abs(own[1:] - matrix[np.arange(1, len(items)), np.arange(len(items) - 1)])))
    else:
        ldic = 0.0

    profit = publisher_total_profit(items, profiles, params) if time_ok else float("-inf")
    return FeasibilityReport(
        ir_ok=ir_ok,
        ic_ok=ic_ok,
        monotone_ok=monotone_ok,
        time_ok=time_ok,
        budget_ok=budget_ok,
        lowest_surplus=float(own.min()),
        ic_slack=ic_slack,
        bottom_surplus=float(own[0]),
        ldic_max_abs_gap=ldic,
        budget_spent=spent,
        expected_profit=profit,
    )


def _market_arrays(profiles: Sequence[TypeProfile], params: SystemParams):
    pot = np.array([params.iteration_coeff / profile.type_value for profile in profiles])
    cs = np.array([profile.cpu_cycles * profile.samples for profile in profiles])
    p = np.array([profile.probability for profile in profiles])
    if np.any(np.diff(pot) >= 0.0):
        raise ValueError("profiles must be ordered by strictly increasing type value")
    if cs.max() - cs.min() > 1e-9 * cs.max():
        raise ValueError("the grid oracle needs one shared cycles*samples product across types")
    return pot, cs, p


def _oracle_grid(profiles: Sequence[TypeProfile], params: SystemParams, grid_size: int) -> np.ndarray:
    """Geometric frequency grid guaranteed to bracket every optimal schedule.

    The lower end sits just above the slowest frequency that still meets the
    deadline for the neediest type.  The upper end comes from the first-order
    condition: past ``2*max(a)/d`` the deadline term is within a factor two
    of its limit, and each type's marginal energy-cost weight is at least its
    own population share times its iteration ratio, which bounds any
    stationary frequency by ``(w / (l*mu*zeta*d))^(1/3)``; a 10% margin is
    added on top.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    pot, cs, _ = _market_arrays(profiles, params)
    d = params.t_max - effective_comm_time(params)
    a_max = float(np.max(pot * cs))
    f_lo = (a_max / d) * (1.0 + 1e-6)
    f_hi = 1.1 * max(
        2.0 * a_max / d,
        (
            params.satisfaction_weight
            / (params.reward_unit_cost * params.energy_weight * params.capacitance * d)
        )
        ** (1.0 / 3.0),
    )
    return np.geomspace(f_lo, f_hi, grid_size)


def brute_force_solve(
    profiles: Sequence[TypeProfile], params: SystemParams, grid_size: int = 220
) -> OracleResult:
    """Exhaustively search all monotone menus on a frequency grid.

    Every non-decreasing frequency tuple on the grid is priced with the
    minimal truth-telling reward ladder, filtered by the budget, and scored
    by expected profit.  Purely combinatorial — no calculus shared with the
    solver — so its winner is an independent lower bound on the optimum,
    exact up to grid resolution.

    The tuple count grows as ``C(grid_size + M - 1, M)``; markets where that
    exceeds 3e8 are refused up front rather than left to run for hours.
    """
    worst_case = math.comb(grid_size + len(profiles) - 1, len(profiles))
    if worst_case > 300_000_000:
        raise ValueError(
            f"exhaustive search would enumerate ~{worst_case:.2e} menus; "
            "lower grid_size or the number of types"
        )
    pot, cs, p = _market_arrays(profiles, params)
    d = params.t_max - effective_comm_time(params)
    grid = _oracle_grid(profiles, params, grid_size)
    a = pot * cs
    min_idx = np.zeros(len(profiles), dtype=np.longlong)
    for n in range(len(profiles)):
        i = int(np.searchsorted(grid, a[n] / d, side="right"))
        while i < len(grid) and d - a[n] / grid[i] <= 0.0:
            i += 1
        min_idx[n] = i
    n_pop = float(params.population)
    profit, idx = backend.best_menu_on_grid(
        np.ascontiguousarray(grid),
        min_idx,
        np.ascontiguousarray(pot),
        np.ascontiguousarray(cs),
        np.ascontiguousarray(n_pop * p * params.satisfaction_weight),
        np.ascontiguousarray(n_pop * p * params.reward_unit_cost),
        np.ascontiguousarray(n_pop * p),
        params.capacitance,
        params.energy_weight,
        d,
        effective_comm_energy(params),
        params.r_max,
    )
    if idx[0] < 0:
        raise BudgetInfeasibleError(
            "no monotone menu on the oracle grid fits the reward budget"
        )
    if np.any(idx >= len(grid) - 1):
        raise ConvergenceError(
            "oracle optimum landed on the top grid edge; the search box is too small"
        )
    freqs = grid[idx]
    rewards = recover_rewards(freqs, profiles, params)
    return OracleResult(
        freqs=freqs,
        rewards=rewards,
        expected_profit=float(profit),
        budget_spent=n_pop * float(np.dot(p, rewards)),
        grid=grid,
    )


def grid_resolution_bound(
    freqs: Sequence[float],
    grid: np.ndarray,
    profiles: Sequence[TypeProfile],
    params: SystemParams,
) -> float:
    """Profit lost by snapping a schedule down onto the oracle grid.

    Rounding every frequency down to the nearest grid point keeps the
    schedule monotone, deadline-feasible, and within budget, so the oracle's
    winner can trail the true optimum by at most this much.
    """
    f = np.asarray(freqs, dtype=float)
    if np.any(f < grid[0] * (1.0 - 1e-12)):
        raise ValueError("schedule falls below the oracle grid; no round-down exists")
    pos = np.searchsorted(grid, f * (1.0 + 1e-15), side="right") - 1
    snapped = grid[pos]
    exact = publisher_total_profit(
        [ContractItem(float(x), float(r)) for x, r in zip(f, recover_rewards(f, profiles, params))],
        profiles,
        params,
    )
    coarse = publisher_total_profit(
        [
            ContractItem(float(x), float(r))
            for x, r in zip(snapped, recover_rewards(snapped, profiles, params))
        ],
        profiles,
        params,
    )
    return exact - coarse
