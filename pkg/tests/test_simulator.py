"""Scenario construction, owner behaviour, and sweep tests."""

import numpy as np
import pytest

from fedcontract import (
    ConfigError,
    ContractItem,
    ScenarioConfig,
    SystemParams,
    accuracy_sweep,
    build_types,
    owner_select_item,
    run_scenario,
    type_count_sweep,
)
from fedcontract.simulator import _quota_counts

from test_solver import hand_params, hand_profiles


class TestBuildTypes:
    def test_default_ladder(self):
        profiles = build_types(ScenarioConfig(), SystemParams())
        assert len(profiles) == 10
        assert profiles[0].quality == pytest.approx(0.20)
        assert profiles[1].quality == pytest.approx(0.28)
        assert profiles[-1].quality == pytest.approx(0.92)
        assert all(p.probability == pytest.approx(0.1) for p in profiles)
        assert [p.index for p in profiles] == list(range(1, 11))
        # type value = 1/ln(1/quality): scarce high quality is expensive.
        assert profiles[0].type_value == pytest.approx(0.6213349345596119, rel=1e-12)
        assert profiles[-1].type_value == pytest.approx(11.99305233760798, rel=1e-12)
        values = [p.type_value for p in profiles]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_single_type_sits_at_low_end(self):
        (only,) = build_types(ScenarioConfig(type_count=1), SystemParams())
        assert only.quality == pytest.approx(0.20)
        assert only.probability == 1.0


class TestOwnerSelection:
    def test_hand_case_diagonal_with_tie_up(self):
        items = (ContractItem(1.0, 1.5), ContractItem(2.0, 3.0))
        # Type 1 strictly prefers its own item; type 2 is exactly indifferent
        # between the two and the tie goes to the larger contribution.
        assert owner_select_item(hand_profiles()[0], items, hand_params()) == 0
        assert owner_select_item(hand_profiles()[1], items, hand_params()) == 1

    def test_walks_away_from_money_losers(self):
        items = (ContractItem(1.0, 0.1), ContractItem(2.0, 0.2))
        assert owner_select_item(hand_profiles()[0], items, hand_params()) == -1

    def test_empty_menu_rejected(self):
        with pytest.raises(ValueError):
            owner_select_item(hand_profiles()[0], (), hand_params())


class TestQuotaCounts:
    def test_largest_remainder(self):
        counts = _quota_counts(np.array([0.34, 0.33, 0.33]), 10)
        assert counts.tolist() == [4, 3, 3]

    def test_exact_split_untouched(self):
        assert _quota_counts(np.array([0.5, 0.5]), 10).tolist() == [5, 5]

    def test_remainder_ties_go_to_lower_index(self):
        counts = _quota_counts(np.array([1 / 3, 1 / 3, 1 / 3]), 10)
        assert counts.tolist() == [4, 3, 3]

    def test_always_sums_to_owner_count(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            shares = rng.dirichlet(np.ones(rng.integers(1, 8)))
            owners = int(rng.integers(1, 300))
            counts = _quota_counts(shares, owners)
            assert counts.sum() == owners
            assert (counts >= 0).all()


class TestRunScenario:
    def test_quota_replay_matches_expectation(self):
        params = SystemParams()
        report = run_scenario(ScenarioConfig(type_count=5), params)
        assert report.feasibility.ok
        assert report.type_counts.tolist() == [20] * 5
        assert report.selections.tolist() == [0, 1, 2, 3, 4]
        assert report.realized_profit == pytest.approx(report.expected_profit, rel=1e-12)

    def test_iid_replay_close_and_reproducible(self):
        params = SystemParams()
        config = ScenarioConfig(type_count=5, owner_count=10_000, assignment="iid", seed=0)
        report = run_scenario(config, params)
        assert report.type_counts.sum() == 10_000
        assert report.realized_profit == pytest.approx(report.expected_profit, rel=0.02)
        again = run_scenario(config, params)
        assert again.type_counts.tolist() == report.type_counts.tolist()
        assert again.realized_profit == report.realized_profit

    def test_different_seed_changes_draw(self):
        params = SystemParams()
        a = run_scenario(ScenarioConfig(type_count=5, owner_count=137, assignment="iid", seed=1), params)
        b = run_scenario(ScenarioConfig(type_count=5, owner_count=137, assignment="iid", seed=2), params)
        assert a.type_counts.tolist() != b.type_counts.tolist()


class TestSweeps:
    def test_accuracy_sweep_profit_declines(self):
        rows = accuracy_sweep(
            [0.92, 0.60, 0.40], ScenarioConfig(type_count=4), SystemParams()
        )
        assert [row["quality_limit"] for row in rows] == [0.92, 0.60, 0.40]
        profits = [row["expected_profit"] for row in rows]
        assert all(a >= b - 1e-9 for a, b in zip(profits, profits[1:]))
        for row in rows:
            assert row["realized_profit"] == pytest.approx(row["expected_profit"], rel=1e-9)

    def test_accuracy_sweep_rejects_rising_limits(self):
        with pytest.raises(ValueError, match="non-increasing"):
            accuracy_sweep([0.5, 0.9], ScenarioConfig(type_count=3), SystemParams())

    def test_type_count_sweep_ordering(self):
        rows = type_count_sweep([1, 2, 3], ScenarioConfig(), SystemParams())
        assert [row["type_count"] for row in rows] == [1, 2, 3]
        for row in rows:
            assert row["symmetric_profit"] >= row["contract_profit"] - 1e-9
            assert row["contract_profit"] >= row["asymmetric_profit"] - 1e-9

    def test_type_count_sweep_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            type_count_sweep([2, 0], ScenarioConfig(), SystemParams())


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"type_count": 0},
            {"quality_lo": 0.0},
            {"quality_hi": 1.0},
            {"quality_lo": 0.9, "quality_hi": 0.5},
            {"type_count": 2, "quality_lo": 0.5, "quality_hi": 0.5},
            {"cpu_cycles": 0.0},
            {"samples": -1.0},
            {"owner_count": 0},
            {"assignment": "random"},
            {"seed": -1},
        ],
    )
    def test_bad_configs_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            ScenarioConfig(**kwargs)

    def test_single_degenerate_quality_allowed(self):
        config = ScenarioConfig(type_count=1, quality_lo=0.5, quality_hi=0.5)
        assert config.quality_lo == 0.5
