"""Optimal contract-menu computation.

The publisher offers one (CPU frequency, reward) item per owner type and
maximizes expected profit subject to participation, truth-telling, the round
deadline, and a total reward budget.  Standard screening arguments collapse
the constraint set: frequencies must be non-decreasing in type, the lowest
type keeps zero surplus, and each adjacent truth-telling constraint binds,
which prices the whole menu from the frequency schedule alone.  Substituting
the resulting reward ladder into the profit leaves a separable concave
program in the frequencies.  Each type's first-order condition is solved by
bisection, monotonicity violations are repaired by pool-adjacent-violators
re-solves, and the budget enters through one scalar multiplier, itself found
by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import backend
from .costmodel import (
    ContractItem,
    SystemParams,
    TypeProfile,
    effective_comm_energy,
    effective_comm_time,
    publisher_profit_one,
)
from .errors import BudgetInfeasibleError, DegenerateMarketError, InfeasibleTimeError


@dataclass(frozen=True)
class ContractMenu:
    """A solved menu: one item per type, ascending in type.

    ``shadow_price`` is the budget multiplier; zero means the budget did not
    bind.  ``budget_spent`` is the expected total reward bill across the
    population.
    """

    items: tuple[ContractItem, ...]
    expected_profit: float
    budget_spent: float
    shadow_price: float

    @property
    def freqs(self) -> tuple[float, ...]:
        return tuple(item.cpu_freq for item in self.items)

    @property
    def rewards(self) -> tuple[float, ...]:
        return tuple(item.reward for item in self.items)


class _ReducedData(NamedTuple):
    """Per-type arrays of the reduced program, precomputed once per solve."""

    d: float  # deadline minus communication time
    pot: np.ndarray  # iteration ratio per type
    cs: np.ndarray  # cycles * samples per type
    a: np.ndarray  # pot * cs: compute-time load per unit of 1/f
    sat: np.ndarray  # population * share * satisfaction weight
    g: np.ndarray  # virtual reward weights
    p: np.ndarray  # population shares
    e_com: float


def g_coefficients(
    probabilities: Sequence[float], type_values: Sequence[float], iteration_coeff: float = 1.0
) -> np.ndarray:
    """Virtual per-type weights of the reward bill.

    With minimal truth-telling rewards the expected per-owner bill equals
    ``mu * (E_com + sum_n g_n * zeta * cs_n * f_n^2)``; the ``g_n`` computed
    here are those weights.  Each type pays for its own energy at its own
    iteration ratio and, through the information rent, for the energy of
    every higher type at the *gap* between adjacent iteration ratios:

        g_n = p_n * k/v_n + (k/v_n - k/v_{n+1}) * sum_{i>n} p_i
        g_last = p_last * k/v_last

    where ``k`` is the iteration coefficient and ``v`` the type values.
    Strictly positive whenever type values strictly increase.
    """
    p = np.asarray(probabilities, dtype=float)
    v = np.asarray(type_values, dtype=float)
    if p.shape != v.shape or p.ndim != 1 or p.size == 0:
        raise ValueError("probabilities and type_values must be equal-length 1-D sequences")
    if np.any(v <= 0.0):
        raise ValueError("type_values must be strictly positive")
    if np.any(np.diff(v) <= 0.0):
        raise DegenerateMarketError("type_values must be strictly increasing")
    if np.any(p <= 0.0):
        raise DegenerateMarketError("every type needs a strictly positive probability")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"type probabilities must sum to 1, got {p.sum()!r}")
    if iteration_coeff <= 0.0:
        raise ValueError("iteration_coeff must be strictly positive")
    pot = iteration_coeff / v
    g = p * pot
    if p.size > 1:
        tail = np.concatenate([np.cumsum(p[::-1])[-2::-1], [0.0]])
        g[:-1] += (pot[:-1] - pot[1:]) * tail[:-1]
    return g


def _reduced_data(profiles: Sequence[TypeProfile], params: SystemParams) -> _ReducedData:
    if len(profiles) == 0:
        raise ValueError("at least one type profile is required")
    v = np.array([pr.type_value for pr in profiles], dtype=float)
    p = np.array([pr.probability for pr in profiles], dtype=float)
    cs = np.array([pr.cpu_cycles * pr.samples for pr in profiles], dtype=float)
    if cs.max() - cs.min() > 1e-9 * cs.max():
        raise ValueError(
            "profiles must share one cycles*samples product; otherwise a monotone "
            "frequency schedule no longer orders the energies and minimal-reward "
            "pricing stops being incentive compatible"
        )
    g = g_coefficients(p, v, params.iteration_coeff)
    pot = params.iteration_coeff / v
    d = params.t_max - effective_comm_time(params)
    return _ReducedData(
        d=d,
        pot=pot,
        cs=cs,
        a=pot * cs,
        sat=params.population * p * params.satisfaction_weight,
        g=g,
        p=p,
        e_com=effective_comm_energy(params),
    )


def recover_rewards(
    freqs: Sequence[float], profiles: Sequence[TypeProfile], params: SystemParams
) -> np.ndarray:
    """Minimal rewards that keep a monotone frequency schedule truthful.

    The lowest type is paid exactly its cost (zero surplus); each higher
    type is paid the previous reward plus its own energy increment, which
    makes every adjacent downward deviation exactly indifferent.
    """
    f = np.asarray(freqs, dtype=float)
    if f.ndim != 1 or len(f) != len(profiles):
        raise ValueError("freqs must be a 1-D sequence with one entry per profile")
    if np.any(f <= 0.0):
        raise ValueError("frequencies must be strictly positive")
    if np.any(np.diff(f) < -1e-12 * f[:-1]):
        raise ValueError("frequency schedule must be non-decreasing across types")
    data = _reduced_data(profiles, params)
    mu = params.energy_weight
    energy = params.capacitance * data.cs * f * f
    rewards = np.empty(len(f))
    rewards[0] = mu * (data.e_com + data.pot[0] * energy[0])
    for n in range(1, len(f)):
        rewards[n] = rewards[n - 1] + mu * data.pot[n] * (energy[n] - energy[n - 1])
    return rewards


def reduced_objective(
    freqs: Sequence[float], profiles: Sequence[TypeProfile], params: SystemParams
) -> float:
    """Expected publisher profit of a frequency schedule under minimal rewards.

    Evaluates the frequency-only form of the profit, with the reward bill
    folded in through the virtual weights of :func:`g_coefficients`; it agrees
    with pricing the schedule explicitly and summing per-type profits.
    """
    f = np.asarray(freqs, dtype=float)
    data = _reduced_data(profiles, params)
    if f.shape != data.p.shape:
        raise ValueError("freqs must carry one entry per profile")
    slack = data.d - data.a / f
    if np.any(slack <= 0.0):
        raise InfeasibleTimeError("some type misses the deadline at this schedule")
    n_pop = params.population
    mu = params.energy_weight
    bill_quad = n_pop * mu * params.capacitance * float(np.sum(data.g * data.cs * f * f))
    satisfaction = float(np.sum(data.sat * np.log(slack)))
    return satisfaction - params.reward_unit_cost * (n_pop * mu * data.e_com + bill_quad)


def _quad_weights(data: _ReducedData, params: SystemParams, shadow_price: float) -> np.ndarray:
    price = params.reward_unit_cost + shadow_price
    return params.population * price * params.energy_weight * params.capacitance * data.g * data.cs


def _stationary_schedule(
    data: _ReducedData, params: SystemParams, shadow_price: float, rel_tol: float
) -> np.ndarray:
    quad = _quad_weights(data, params, shadow_price)
    out = np.empty(len(data.p))
    for n in range(len(data.p)):
        out[n] = backend.stationary_point(
            data.sat[n : n + 1], data.a[n : n + 1], data.d, float(quad[n]), rel_tol
        )
    return out


def solve_stationary(
    profiles: Sequence[TypeProfile], params: SystemParams, shadow_price: float = 0.0, rel_tol: float = 1e-10
) -> np.ndarray:
    """Per-type unconstrained maximizers of the reduced program.

    Ignores the monotonicity requirement (see :func:`iron_monotonicity`) and
    the budget except through ``shadow_price``.
    """
    if shadow_price < 0.0:
        raise ValueError("shadow_price must be nonnegative")
    return _stationary_schedule(_reduced_data(profiles, params), params, shadow_price, rel_tol)


def _iron(
    data: _ReducedData, params: SystemParams, shadow_price: float, freqs: np.ndarray, rel_tol: float
) -> np.ndarray:
    quad = _quad_weights(data, params, shadow_price)
    # Pool-adjacent-violators: merge any decreasing neighbour blocks and
    # re-solve the pooled concave term; exact for separable concave programs.
    blocks: list[list] = []
    for n in range(len(freqs)):
        blocks.append([n, n, float(freqs[n])])
        while len(blocks) > 1 and blocks[-2][2] > blocks[-1][2]:
            lo = blocks[-2][0]
            hi = blocks[-1][1]
            pooled = backend.stationary_point(
                data.sat[lo : hi + 1],
                data.a[lo : hi + 1],
                data.d,
                float(quad[lo : hi + 1].sum()),
                rel_tol,
            )
            blocks[-2:] = [[lo, hi, pooled]]
    out = np.empty(len(freqs))
    for lo, hi, value in blocks:
        out[lo : hi + 1] = value
    return out


def iron_monotonicity(
    freqs: Sequence[float],
    profiles: Sequence[TypeProfile],
    params: SystemParams,
    shadow_price: float = 0.0,
    rel_tol: float = 1e-10,
) -> np.ndarray:
    """Repair a non-monotone stationary schedule by pooling.

    Adjacent types whose unconstrained frequencies decrease are merged and
    assigned the maximizer of their pooled objective term; merging cascades
    until the schedule is non-decreasing.  A schedule that is already
    monotone comes back unchanged.
    """
    f = np.asarray(freqs, dtype=float)
    data = _reduced_data(profiles, params)
    if f.shape != data.p.shape:
        raise ValueError("freqs must carry one entry per profile")
    if np.any(f <= 0.0):
        raise ValueError("frequencies must be strictly positive")
    return _iron(data, params, shadow_price, f, rel_tol)


def _bill_reduced(data: _ReducedData, params: SystemParams, freqs: np.ndarray) -> float:
    """Expected population reward bill in the frequency-only form."""
    mu = params.energy_weight
    quad = float(np.sum(data.g * data.cs * freqs * freqs))
    return params.population * mu * (data.e_com + params.capacitance * quad)


def _solve_budget_constrained(
    data: _ReducedData, params: SystemParams, rel_tol: float
) -> tuple[float, np.ndarray, float]:
    """Bisection on the budget multiplier; returns (price, schedule, bill)."""

    def evaluate(price: float) -> tuple[np.ndarray, float]:
        schedule = _iron(data, params, price, _stationary_schedule(data, params, price, rel_tol), rel_tol)
        return schedule, _bill_reduced(data, params, schedule)

    lo = 0.0
    hi = 1.0
    schedule, bill = evaluate(hi)
    while bill > params.r_max:
        lo = hi
        hi *= 2.0
        if hi > 1e18:
            raise BudgetInfeasibleError(
                "reward budget cannot cover minimal deadline-feasible menus "
                f"(bill stays above {params.r_max!r} at any multiplier)"
            )
        schedule, bill = evaluate(hi)
    best = (hi, schedule, bill)
    for _ in range(200):
        if hi - lo <= 1e-13 * max(hi, 1.0):
            break
        mid = 0.5 * (lo + hi)
        schedule, bill = evaluate(mid)
        if bill > params.r_max:
            lo = mid
        else:
            hi = mid
            best = (mid, schedule, bill)
            if params.r_max - bill <= 1e-10 * params.r_max:
                break
    return best


def solve(
    profiles: Sequence[TypeProfile], params: SystemParams, rel_tol: float = 1e-10
) -> ContractMenu:
    """Solve the full menu-design problem.

    Returns the profit-maximal menu that is deadline-feasible, keeps every
    type weakly willing to participate and to report truthfully, and spends
    at most ``params.r_max`` in expected rewards.  Raises
    :class:`BudgetInfeasibleError` when no such menu exists.
    """
    data = _reduced_data(profiles, params)
    shadow_price = 0.0
    schedule = _iron(data, params, 0.0, _stationary_schedule(data, params, 0.0, rel_tol), rel_tol)
    bill = _bill_reduced(data, params, schedule)
    if bill > params.r_max * (1.0 + 1e-12):
        shadow_price, schedule, bill = _solve_budget_constrained(data, params, rel_tol)
    rewards = recover_rewards(schedule, profiles, params)
    items = tuple(
        ContractItem(cpu_freq=float(f), reward=float(r)) for f, r in zip(schedule, rewards)
    )
    expected_profit = params.population * sum(
        pr.probability * publisher_profit_one(pr, item, params)
        for pr, item in zip(profiles, items)
    )
    spent = params.population * float(np.dot(data.p, rewards))
    return ContractMenu(
        items=items,
        expected_profit=float(expected_profit),
        budget_spent=spent,
        shadow_price=shadow_price,
    )
