"""Stackelberg pricing baselines the contract menu is benchmarked against.

Two classical leader-follower schemes bracket the contract's information
setting.  With *symmetric* information the publisher observes each owner's
type and pays exactly its cost — the first-best, an upper bound no screening
scheme can beat.  With *asymmetric* information and no menu, the publisher
can only post one linear price per unit of CPU frequency and owners
self-select; late or absent updates earn nothing, so owners whose best
response loses money or misses the deadline rationally stay out.
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
    publisher_profit_one,
)
from .errors import BudgetInfeasibleError


@dataclass(frozen=True)
class StackelbergOutcome:
    """Equilibrium of one pricing scheme.

    ``freqs``/``rewards`` carry one entry per type; abstaining types (only
    possible under ``"asymmetric"``) show zeros.  ``price`` is the posted
    per-frequency-unit price for the asymmetric scheme, ``None`` otherwise.
    """

    regime: str
    freqs: np.ndarray
    rewards: np.ndarray
    participation: np.ndarray
    expected_profit: float
    budget_spent: float
    shadow_price: float
    price: float | None = None


def _owner_cost(profile: TypeProfile, params: SystemParams, freq: float) -> float:
    pot = params.iteration_coeff / profile.type_value
    energy = params.capacitance * profile.cpu_cycles * profile.samples * freq * freq
    return params.energy_weight * (effective_comm_energy(params) + pot * energy)


def solve_symmetric(
    profiles: Sequence[TypeProfile], params: SystemParams, rel_tol: float = 1e-10
) -> StackelbergOutcome:
    """First-best benchmark with observable types.

    The publisher pays every owner exactly its participation cost and picks
    each type's frequency separately; only the shared reward budget couples
    the types, handled by bisection on its multiplier.
    """
    p = np.array([profile.probability for profile in profiles])
    pot = np.array([params.iteration_coeff / profile.type_value for profile in profiles])
    cs = np.array([profile.cpu_cycles * profile.samples for profile in profiles])
    if np.any(p <= 0.0):
        raise ValueError("every type needs a strictly positive probability")
    d = params.t_max - effective_comm_time(params)
    a = pot * cs
    sat = params.population * p * params.satisfaction_weight
    e_com = effective_comm_energy(params)
    mu = params.energy_weight
    n_pop = float(params.population)

    def schedule(price: float) -> np.ndarray:
        quad = n_pop * p * (params.reward_unit_cost + price) * mu * pot * params.capacitance * cs
        out = np.empty(len(p))
        for n in range(len(p)):
            out[n] = backend.stationary_point(sat[n : n + 1], a[n : n + 1], d, float(quad[n]), rel_tol)
        return out

    def bill(freqs: np.ndarray) -> float:
        energy = params.capacitance * cs * freqs * freqs
        return n_pop * mu * float(np.dot(p, e_com + pot * energy))

    shadow = 0.0
    freqs = schedule(0.0)
    spent = bill(freqs)
    if spent > params.r_max * (1.0 + 1e-12):
        lo, hi = 0.0, 1.0
        freqs = schedule(hi)
        spent = bill(freqs)
        while spent > params.r_max:
            lo = hi
            hi *= 2.0
            if hi > 1e18:
                raise BudgetInfeasibleError(
                    "reward budget cannot cover first-best costs at any multiplier"
                )
            freqs = schedule(hi)
            spent = bill(freqs)
        shadow, best_f, best_b = hi, freqs, spent
        for _ in range(200):
            if hi - lo <= 1e-13 * max(hi, 1.0):
                break
            mid = 0.5 * (lo + hi)
            freqs = schedule(mid)
            spent = bill(freqs)
            if spent > params.r_max:
                lo = mid
            else:
                hi = mid
                shadow, best_f, best_b = mid, freqs, spent
                if params.r_max - spent <= 1e-10 * params.r_max:
                    break
        freqs, spent = best_f, best_b
    rewards = np.array(
        [_owner_cost(profile, params, float(f)) for profile, f in zip(profiles, freqs)]
    )
    profit = n_pop * sum(
        profile.probability * publisher_profit_one(profile, ContractItem(float(f), float(r)), params)
        for profile, f, r in zip(profiles, freqs, rewards)
    )
    return StackelbergOutcome(
        regime="symmetric",
        freqs=freqs,
        rewards=rewards,
        participation=np.ones(len(p), dtype=bool),
        expected_profit=float(profit),
        budget_spent=spent,
        shadow_price=shadow,
    )


def follower_response(profile: TypeProfile, params: SystemParams, price: float) -> float:
    """An owner's best contribution to a posted per-frequency price.

    Maximizing ``price*f - cost(f)`` gives ``f = price / (2*mu*pot*zeta*c*s)``.
    Returns 0.0 when even that frequency loses the owner money or misses the
    deadline, since an update that never pays is not worth producing.
    """
    if price < 0.0:
        raise ValueError("price must be nonnegative")
    if price == 0.0:
        return 0.0
    pot = params.iteration_coeff / profile.type_value
    cs = profile.cpu_cycles * profile.samples
    freq = price / (2.0 * params.energy_weight * pot * params.capacitance * cs)
    utility = price * freq - _owner_cost(profile, params, freq)
    slack = params.t_max - (pot * cs / freq + effective_comm_time(params))
    if utility < 0.0 or slack <= 0.0:
        return 0.0
    return freq


def expected_profit_at_price(
    profiles: Sequence[TypeProfile], params: SystemParams, price: float
) -> tuple[float, float]:
    """Publisher profit and reward bill at a posted price.

    Owners play their best response; abstaining types add nothing to either
    total.  Returns ``(expected_profit, expected_spend)``.
    """
    profit = 0.0
    spent = 0.0
    n_pop = float(params.population)
    for profile in profiles:
        freq = follower_response(profile, params, price)
        if freq <= 0.0:
            continue
        pay = price * freq
        share = n_pop * profile.probability
        profit += share * publisher_profit_one(profile, ContractItem(freq, pay), params)
        spent += share * pay
    return profit, spent


def solve_asymmetric(profiles: Sequence[TypeProfile], params: SystemParams) -> StackelbergOutcome:
    """Best uniform linear price under hidden types.

    The price axis splits at each type's participation threshold (the larger
    of its break-even price and its deadline price) into cells with a fixed
    participant set; profit is concave on each cell, so a ternary search per
    cell, capped where the reward bill hits the budget, finds the optimum.
    Ties across cells resolve to the lowest price.
    """
    mu = params.energy_weight
    d = params.t_max - effective_comm_time(params)
    e_com = effective_comm_energy(params)
    n_pop = float(params.population)
    thresholds = []
    response_slope = []
    for profile in profiles:
        pot = params.iteration_coeff / profile.type_value
        cs = profile.cpu_cycles * profile.samples
        pi_even = 2.0 * mu * math.sqrt(pot * params.capacitance * cs * e_com)
        pi_deadline = 2.0 * mu * params.capacitance * cs * cs * pot * pot / d
        thresholds.append(max(pi_even, pi_deadline))
        response_slope.append(1.0 / (2.0 * mu * pot * params.capacitance * cs))

    best_profit = 0.0
    best_price = 0.0
    edges = sorted(set(thresholds))
    for k, lo in enumerate(edges):
        hi = edges[k + 1] if k + 1 < len(edges) else math.inf
        coef = sum(
            n_pop * profile.probability * slope
            for profile, thr, slope in zip(profiles, thresholds, response_slope)
            if thr <= lo
        )
        cap = math.sqrt(params.r_max / coef) * (1.0 - 1e-12)
        # Search a hair inside the cell: exactly on an edge, float noise can
        # flip the marginal type in or out and poison the evaluation.
        dom_lo = lo * (1.0 + 1e-9)
        dom_hi = min(hi * (1.0 - 1e-9), cap)
        if dom_hi < dom_lo:
            continue
        a_pt, b_pt = dom_lo, dom_hi
        for _ in range(200):
            m1 = a_pt + (b_pt - a_pt) / 3.0
            m2 = b_pt - (b_pt - a_pt) / 3.0
            if expected_profit_at_price(profiles, params, m1)[0] < expected_profit_at_price(profiles, params, m2)[0]:
                a_pt = m1
            else:
                b_pt = m2
        for candidate in (dom_lo, 0.5 * (a_pt + b_pt), dom_hi):
            profit, spent = expected_profit_at_price(profiles, params, candidate)
            if spent <= params.r_max * (1.0 + 1e-9) and profit > best_profit:
                best_profit = profit
                best_price = candidate

    freqs = np.array([follower_response(profile, params, best_price) for profile in profiles])
    rewards = best_price * freqs
    profit, spent = expected_profit_at_price(profiles, params, best_price)
    return StackelbergOutcome(
        regime="asymmetric",
        freqs=freqs,
        rewards=rewards,
        participation=freqs > 0.0,
        expected_profit=profit,
        budget_spent=spent,
        shadow_price=0.0,
        price=best_price,
    )
