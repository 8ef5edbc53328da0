"""Tests for the two pricing baselines.

Anchors: the first-best must weakly beat the screening menu, collapse to it
when there is a single type, and leave every owner with zero surplus; the
posted-price scheme must never beat either and must survive a dense scan of
alternative prices.
"""

import math

import numpy as np
import pytest

from fedcontract import (
    BudgetInfeasibleError,
    ContractItem,
    ScenarioConfig,
    SystemParams,
    build_types,
    effective_comm_energy,
    effective_comm_time,
    expected_profit_at_price,
    follower_response,
    owner_utility,
    solve,
    solve_asymmetric,
    solve_symmetric,
)


def _threshold(profile, params):
    """Lowest price at which this type both profits and meets the deadline."""
    pot = params.iteration_coeff / profile.type_value
    cs = profile.cpu_cycles * profile.samples
    d = params.t_max - effective_comm_time(params)
    even = 2.0 * params.energy_weight * math.sqrt(
        pot * params.capacitance * cs * effective_comm_energy(params)
    )
    deadline = 2.0 * params.energy_weight * params.capacitance * cs * cs * pot * pot / d
    return max(even, deadline)


class TestSymmetric:
    def test_single_type_collapses_to_contract(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=1), params)
        menu = solve(profiles, params)
        sym = solve_symmetric(profiles, params)
        assert sym.freqs[0] == menu.freqs[0]
        assert sym.rewards[0] == menu.rewards[0]
        assert sym.expected_profit == menu.expected_profit
        assert sym.shadow_price == menu.shadow_price

    @pytest.mark.parametrize("type_count", [2, 5, 10])
    def test_first_best_weakly_beats_screening(self, type_count):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=type_count), params)
        menu = solve(profiles, params)
        sym = solve_symmetric(profiles, params)
        assert sym.expected_profit >= menu.expected_profit - 1e-9

    def test_owners_keep_zero_surplus(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=4), params)
        sym = solve_symmetric(profiles, params)
        for profile, f, r in zip(profiles, sym.freqs, sym.rewards):
            surplus = owner_utility(profile, ContractItem(float(f), float(r)), params)
            assert surplus == pytest.approx(0.0, abs=1e-9)

    def test_budget_bisection_binds(self):
        profiles = build_types(ScenarioConfig(type_count=3), SystemParams())
        unconstrained = solve_symmetric(profiles, SystemParams(r_max=1e12))
        assert unconstrained.shadow_price == 0.0
        assert unconstrained.budget_spent > 5000.0
        tight = solve_symmetric(profiles, SystemParams(r_max=5000.0))
        assert tight.shadow_price > 0.0
        assert tight.budget_spent == pytest.approx(5000.0, rel=1e-8)
        assert tight.budget_spent <= 5000.0 * (1.0 + 1e-9)
        assert tight.expected_profit < unconstrained.expected_profit

    def test_budget_below_communication_cost_is_hopeless(self):
        # Communication alone bills population * mu * E_com = 2000.
        profiles = build_types(ScenarioConfig(type_count=2), SystemParams())
        with pytest.raises(BudgetInfeasibleError):
            solve_symmetric(profiles, SystemParams(r_max=1500.0))


class TestFollowerResponse:
    def test_first_order_condition(self):
        params = SystemParams()
        profile = build_types(ScenarioConfig(type_count=3), params)[2]
        price = 2.0 * _threshold(profile, params)
        freq = follower_response(profile, params, price)
        assert freq > 0.0

        def net(f):
            pot = params.iteration_coeff / profile.type_value
            cost = params.energy_weight * (
                effective_comm_energy(params)
                + pot * params.capacitance * profile.cpu_cycles * profile.samples * f * f
            )
            return price * f - cost

        h = 1e-6 * freq
        slope = (net(freq + h) - net(freq - h)) / (2.0 * h)
        assert slope == pytest.approx(0.0, abs=1e-5 * price)
        assert net(freq) > 0.0

    def test_threshold_is_sharp(self):
        params = SystemParams()
        for profile in build_types(ScenarioConfig(type_count=3), params):
            thr = _threshold(profile, params)
            assert follower_response(profile, params, thr * 0.999) == 0.0
            assert follower_response(profile, params, thr * 1.001) > 0.0

    def test_degenerate_prices(self):
        params = SystemParams()
        profile = build_types(ScenarioConfig(type_count=1), params)[0]
        assert follower_response(profile, params, 0.0) == 0.0
        with pytest.raises(ValueError):
            follower_response(profile, params, -1.0)

    def test_abstainers_billed_nothing(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=3), params)
        thresholds = [_threshold(profile, params) for profile in profiles]
        price = 0.5 * (sorted(thresholds)[0] + sorted(thresholds)[1])
        profit, spent = expected_profit_at_price(profiles, params, price)
        manual = sum(
            params.population * profile.probability * price
            * follower_response(profile, params, price)
            for profile in profiles
        )
        assert spent == pytest.approx(manual, rel=1e-12)
        participating = [follower_response(p, params, price) > 0 for p in profiles]
        assert participating == [False, False, True]


class TestAsymmetric:
    def test_defaults_regression(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=3), params)
        out = solve_asymmetric(profiles, params)
        assert out.expected_profit == pytest.approx(317349.1265909589, rel=1e-9)
        assert out.price == pytest.approx(18.262706163744102, rel=1e-9)
        assert out.participation.tolist() == [False, False, True]
        assert out.rewards == pytest.approx(out.price * out.freqs)

    @pytest.mark.parametrize("type_count", [1, 2, 3, 5])
    def test_never_beats_menu_or_first_best(self, type_count):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=type_count), params)
        asym = solve_asymmetric(profiles, params)
        assert asym.expected_profit <= solve(profiles, params).expected_profit + 1e-9
        assert asym.expected_profit <= solve_symmetric(profiles, params).expected_profit + 1e-9
        assert asym.budget_spent <= params.r_max * (1.0 + 1e-9)

    @pytest.mark.parametrize("type_count", [1, 3, 5])
    def test_survives_dense_price_scan(self, type_count):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=type_count), params)
        asym = solve_asymmetric(profiles, params)
        hi = 2.0 * max([_threshold(p, params) for p in profiles] + [asym.price])
        best = 0.0
        for price in np.linspace(1e-6, hi, 2000):
            profit, spent = expected_profit_at_price(profiles, params, float(price))
            if spent <= params.r_max * (1.0 + 1e-9):
                best = max(best, profit)
        assert asym.expected_profit >= best * (1.0 - 1e-5)

    def test_participation_set_matches_thresholds(self):
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=5), params)
        asym = solve_asymmetric(profiles, params)
        expected = [asym.price > _threshold(p, params) for p in profiles]
        assert asym.participation.tolist() == expected

    def test_single_type_is_budget_capped(self):
        # One type, huge surplus: the optimum rides the reward budget.
        params = SystemParams()
        profiles = build_types(ScenarioConfig(type_count=1), params)
        asym = solve_asymmetric(profiles, params)
        assert asym.budget_spent == pytest.approx(params.r_max, rel=1e-8)

    def test_tiny_budget_shuts_market(self):
        params = SystemParams(r_max=1.0)
        profiles = build_types(ScenarioConfig(type_count=3), params)
        out = solve_asymmetric(profiles, params)
        assert out.price == 0.0
        assert out.expected_profit == 0.0
        assert not out.participation.any()
        assert out.budget_spent == 0.0
