"""Solver tests.

The anchor is a two-type market small enough to price by hand; the frozen
numbers below were derived by hand first.  With type values (1, 2), equal
shares, c*s = 1, capacitance 1, energy weight 1, E_com = 0.5:

    iteration ratios  pot = (1, 1/2)
    g_1 = 0.5*1 + (1 - 0.5)*0.5 = 0.75          g_2 = 0.5*0.5 = 0.25
    at frequencies (1, 2): energies E = (1, 4)
    R_1 = 0.5 + 1*1 = 1.5                        R_2 = 1.5 + 0.5*(4-1) = 3.0
    utilities: U11 = 0, U22 = 0.5, U21 = 0.5 (tie), U12 = -1.5
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fedcontract import (
    BudgetInfeasibleError,
    ContractItem,
    DegenerateMarketError,
    InfeasibleTimeError,
    ScenarioConfig,
    SystemParams,
    TypeProfile,
    build_types,
    effective_comm_energy,
    feasibility_report,
    g_coefficients,
    iron_monotonicity,
    owner_utility,
    publisher_total_profit,
    recover_rewards,
    reduced_objective,
    solve,
    solve_stationary,
)


def hand_params(**overrides):
    base = dict(
        capacitance=1.0,
        iteration_coeff=1.0,
        energy_weight=1.0,
        satisfaction_weight=2.0,
        reward_unit_cost=1.0,
        t_max=100.0,
        r_max=1e6,
        population=10,
        tcom_override=1.0,
        ecom_override=0.5,
    )
    base.update(overrides)
    return SystemParams(**base)


def hand_profiles():
    return (
        TypeProfile(index=1, quality=math.exp(-1.0), type_value=1.0, probability=0.5,
                    cpu_cycles=1.0, samples=1.0),
        TypeProfile(index=2, quality=math.exp(-0.5), type_value=2.0, probability=0.5,
                    cpu_cycles=1.0, samples=1.0),
    )


def random_market(rng, m=None, iteration_coeff=1.0):
    m = int(rng.integers(1, 5)) if m is None else m
    qualities = np.sort(rng.uniform(0.05, 0.95, size=m))
    while len(np.unique(qualities)) < m:
        qualities = np.sort(rng.uniform(0.05, 0.95, size=m))
    probs = rng.dirichlet(np.ones(m))
    cs_c, cs_s = rng.uniform(1.0, 10.0), rng.uniform(5.0, 30.0)
    profiles = tuple(
        TypeProfile(
            index=n + 1,
            quality=float(q),
            type_value=iteration_coeff / math.log(1.0 / q),
            probability=float(p),
            cpu_cycles=cs_c,
            samples=cs_s,
        )
        for n, (q, p) in enumerate(zip(qualities, probs))
    )
    params = SystemParams(
        capacitance=rng.uniform(0.2, 2.0),
        iteration_coeff=iteration_coeff,
        satisfaction_weight=rng.uniform(200.0, 3000.0),
        energy_weight=rng.uniform(0.5, 2.0),
        t_max=rng.uniform(300.0, 900.0),
        r_max=rng.uniform(3000.0, 30000.0),
        population=int(rng.integers(20, 200)),
    )
    return profiles, params


class TestGCoefficients:
    def test_hand_case(self):
        g = g_coefficients([0.5, 0.5], [1.0, 2.0], 1.0)
        assert g == pytest.approx([0.75, 0.25], abs=1e-15)

    def test_single_type_is_share_times_ratio(self):
        assert g_coefficients([1.0], [4.0], 2.0) == pytest.approx([0.5])

    @given(st.integers(1, 6), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_always_positive(self, m, seed):
        rng = np.random.default_rng(seed)
        values = np.cumsum(rng.uniform(0.1, 2.0, size=m))
        probs = rng.dirichlet(np.ones(m))
        g = g_coefficients(probs, values, rng.uniform(0.2, 3.0))
        assert np.all(g > 0.0)

    def test_rejects_nonincreasing_values(self):
        with pytest.raises(DegenerateMarketError):
            g_coefficients([0.5, 0.5], [2.0, 2.0], 1.0)

    def test_rejects_bad_probabilities(self):
        with pytest.raises(ValueError):
            g_coefficients([0.5, 0.4], [1.0, 2.0], 1.0)
        with pytest.raises(DegenerateMarketError):
            g_coefficients([1.0, 0.0], [1.0, 2.0], 1.0)


class TestRewardRecovery:
    def test_hand_case(self):
        rewards = recover_rewards([1.0, 2.0], hand_profiles(), hand_params())
        assert rewards == pytest.approx([1.5, 3.0], abs=1e-15)

    def test_rejects_decreasing_schedule(self):
        with pytest.raises(ValueError):
            recover_rewards([2.0, 1.0], hand_profiles(), hand_params())

    def test_reward_bill_matches_virtual_weights(self):
        # N * sum p_n R_n must equal the g-weighted frequency-only form;
        # this is the ledger identity the reduced program rests on.
        rng = np.random.default_rng(42)
        for _ in range(30):
            profiles, params = random_market(rng, iteration_coeff=rng.uniform(0.3, 3.0))
            f = np.sort(rng.uniform(0.5, 3.0, size=len(profiles)))
            rewards = recover_rewards(f, profiles, params)
            p = np.array([pr.probability for pr in profiles])
            direct = float(np.dot(p, rewards))
            g = g_coefficients(
                p, [pr.type_value for pr in profiles], params.iteration_coeff
            )
            cs = np.array([pr.cpu_cycles * pr.samples for pr in profiles])
            viag = params.energy_weight * (
                effective_comm_energy(params)
                + params.capacitance * float(np.sum(g * cs * f * f))
            )
            assert direct == pytest.approx(viag, rel=1e-12)


class TestReducedObjective:
    def test_equals_direct_profit(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            profiles, params = random_market(rng)
            d = params.t_max - 10.0
            a_max = max(
                params.iteration_coeff / pr.type_value * pr.cpu_cycles * pr.samples
                for pr in profiles
            )
            f = np.sort(rng.uniform(1.2 * a_max / d, 6.0 * a_max / d + 2.0, size=len(profiles)))
            rewards = recover_rewards(f, profiles, params)
            items = [ContractItem(float(x), float(r)) for x, r in zip(f, rewards)]
            direct = publisher_total_profit(items, profiles, params)
            reduced = reduced_objective(f, profiles, params)
            assert reduced == pytest.approx(direct, rel=1e-12)

    def test_raises_past_deadline(self):
        with pytest.raises(InfeasibleTimeError):
            reduced_objective([1e-4, 1e-3], hand_profiles(), hand_params())


class TestStationarySchedule:
    def test_first_order_condition_holds(self):
        profiles, params = random_market(np.random.default_rng(9), m=3)
        f = solve_stationary(profiles, params)
        # Central difference of each type's own objective term must vanish.
        for n in range(3):
            def term(x, n=n):
                sched = f.copy()
                sched[n] = x
                return reduced_objective(sched, profiles, params)

            h = 1e-6 * f[n]
            grad = (term(f[n] + h) - term(f[n] - h)) / (2 * h)
            scale = abs(term(f[n])) + 1.0
            assert abs(grad) < 1e-5 * scale

    def test_rejects_negative_multiplier(self):
        with pytest.raises(ValueError):
            solve_stationary(hand_profiles(), hand_params(), shadow_price=-0.1)


class TestIroning:
    def _pooling_market(self):
        params = SystemParams()
        qualities = [0.2, 0.5, 0.92]
        probs = [0.45, 0.02, 0.53]
        profiles = tuple(
            TypeProfile(index=n + 1, quality=q, type_value=1.0 / math.log(1.0 / q),
                        probability=p, cpu_cycles=5.0, samples=20.0)
            for n, (q, p) in enumerate(zip(qualities, probs))
        )
        return profiles, params

    def test_monotone_schedule_unchanged(self):
        profiles, params = random_market(np.random.default_rng(1), m=3)
        f = np.array([1.0, 1.5, 2.0])
        assert iron_monotonicity(f, profiles, params) == pytest.approx(f)

    def test_pools_violating_neighbours(self):
        profiles, params = self._pooling_market()
        raw = solve_stationary(profiles, params)
        assert raw[1] < raw[0], "instance must actually violate monotonicity"
        ironed = iron_monotonicity(raw, profiles, params)
        assert np.all(np.diff(ironed) >= 0.0)
        assert ironed[0] == ironed[1]
        # Pooled value lies between the violating pair.
        assert raw[1] < ironed[0] < raw[0]

    def test_ironing_beats_naive_clipping(self):
        profiles, params = self._pooling_market()
        raw = solve_stationary(profiles, params)
        ironed = iron_monotonicity(raw, profiles, params)
        clipped = np.maximum.accumulate(raw)
        assert reduced_objective(ironed, profiles, params) >= reduced_objective(
            clipped, profiles, params
        ) - 1e-9


class TestSolve:
    def test_budget_slack_keeps_zero_multiplier(self):
        profiles, params = random_market(np.random.default_rng(2), m=3)
        params = SystemParams(**{**params.__dict__, "r_max": 1e9})
        menu = solve(profiles, params)
        assert menu.shadow_price == 0.0
        assert menu.budget_spent < params.r_max

    def test_binding_budget_hits_cap(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(), params)
        menu = solve(profiles, params)
        assert menu.shadow_price > 0.0
        assert menu.budget_spent == pytest.approx(params.r_max, rel=1e-8)
        assert menu.budget_spent <= params.r_max * (1.0 + 1e-9)

    def test_infeasible_budget_raises(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(), params)
        # Even paying communication energy alone needs N*mu*E_com = 2000.
        tight = SystemParams(**{**params.__dict__, "r_max": 2100.0})
        with pytest.raises(BudgetInfeasibleError):
            solve(profiles, tight)

    def test_rejects_heterogeneous_compute_load(self):
        base = hand_profiles()
        profiles = (
            base[0],
            TypeProfile(index=2, quality=base[1].quality, type_value=2.0,
                        probability=0.5, cpu_cycles=3.0, samples=1.0),
        )
        with pytest.raises(ValueError, match="cycles.samples"):
            solve(profiles, hand_params())

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_solution_is_always_feasible(self, seed):
        rng = np.random.default_rng(seed)
        profiles, params = random_market(rng)
        try:
            menu = solve(profiles, params)
        except BudgetInfeasibleError:
            return
        report = feasibility_report(menu.items, profiles, params, tol=1e-9)
        assert report.ok

    def test_lowest_type_earns_nothing_and_ties_bind(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(), params)
        menu = solve(profiles, params)
        assert owner_utility(profiles[0], menu.items[0], params) == pytest.approx(0.0, abs=1e-9)
        for n in range(1, len(profiles)):
            own = owner_utility(profiles[n], menu.items[n], params)
            down = owner_utility(profiles[n], menu.items[n - 1], params)
            assert own == pytest.approx(down, abs=1e-9)

    def test_price_of_hidden_information(self):
        # Rents make the screened menu strictly costlier than paying cost.
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=5), params)
        menu = solve(profiles, params)
        for profile, item in zip(profiles[1:], menu.items[1:]):
            assert owner_utility(profile, item, params) > 0.0
