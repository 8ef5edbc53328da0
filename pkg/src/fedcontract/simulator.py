"""End-to-end market simulation on top of the solver.

Builds type populations from a quality range, lets the solver price them,
replays the menu against simulated owners who each pick their favourite item
(or walk away), and aggregates realized publisher profit.  Also hosts the two
standard parameter sweeps: profit versus the top data-quality level, and the
three-way scheme comparison versus the number of types.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .costmodel import (
    ContractItem,
    SystemParams,
    TypeProfile,
    owner_utility,
    publisher_profit_one,
    type_from_quality,
)
from .errors import ConfigError
from .feasibility import FeasibilityReport, feasibility_report, utility_matrix
from .solver import ContractMenu, solve
from .stackelberg import solve_asymmetric, solve_symmetric


@dataclass(frozen=True)
class ScenarioConfig:
    """Shape of one simulated market.

    ``type_count`` quality levels are spaced evenly across
    ``[quality_lo, quality_hi]`` with equal population shares.  ``owner_count``
    simulated owners are drawn either by deterministic quota (largest
    remainder, the default) or i.i.d. from the type distribution
    (``assignment="iid"``); ``None`` means one owner per head of the
    population in :class:`SystemParams`.
    """

    type_count: int = 10
    quality_lo: float = 0.20
    quality_hi: float = 0.92
    cpu_cycles: float = 5.0
    samples: float = 20.0
    owner_count: int | None = None
    assignment: str = "quota"
    seed: int = 0

    def __post_init__(self):
        if self.type_count < 1:
            raise ConfigError("type_count must be at least 1")
        if not 0.0 < self.quality_lo <= self.quality_hi < 1.0:
            raise ConfigError("quality levels must satisfy 0 < quality_lo <= quality_hi < 1")
        if self.type_count > 1 and self.quality_lo == self.quality_hi:
            raise ConfigError("several types need a non-degenerate quality range")
        if self.cpu_cycles <= 0.0 or self.samples <= 0.0:
            raise ConfigError("cpu_cycles and samples must be strictly positive")
        if self.owner_count is not None and self.owner_count < 1:
            raise ConfigError("owner_count must be at least 1 when given")
        if self.assignment not in ("quota", "iid"):
            raise ConfigError(f"assignment must be 'quota' or 'iid', got {self.assignment!r}")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")


@dataclass(frozen=True)
class ScenarioReport:
    """Everything one simulated market produced."""

    profiles: tuple[TypeProfile, ...]
    menu: ContractMenu
    feasibility: FeasibilityReport
    utilities: np.ndarray
    selections: np.ndarray
    type_counts: np.ndarray
    expected_profit: float
    realized_profit: float


def build_types(config: ScenarioConfig, params: SystemParams) -> tuple[TypeProfile, ...]:
    """Equally likely owner types on an even quality ladder."""
    m = config.type_count
    levels = np.linspace(config.quality_lo, config.quality_hi, m)
    share = 1.0 / m
    return tuple(
        TypeProfile(
            index=n + 1,
            quality=float(q),
            type_value=type_from_quality(float(q), params.iteration_coeff),
            probability=share,
            cpu_cycles=config.cpu_cycles,
            samples=config.samples,
        )
        for n, q in enumerate(levels)
    )


def owner_select_item(
    profile: TypeProfile,
    items: Sequence[ContractItem],
    params: SystemParams,
    tol: float = 1e-9,
) -> int:
    """Index of the item this owner signs, or -1 to walk away.

    Near-ties (within ``tol`` scaled by the utility magnitude) resolve to the
    largest index — the biggest contribution the owner is indifferent about —
    which is also where the binding adjacent truth-telling constraints of an
    optimal menu land.  Walking away wins only when every item strictly loses
    money.
    """
    if not items:
        raise ValueError("menu must contain at least one item")
    utilities = [owner_utility(profile, item, params) for item in items]
    best = max(utilities)
    margin = tol * max(1.0, abs(best))
    if best < -margin:
        return -1
    for k in range(len(utilities) - 1, -1, -1):
        if utilities[k] >= best - margin:
            return k
    raise AssertionError("unreachable: the maximum always clears its own margin")


def _quota_counts(shares: np.ndarray, owner_count: int) -> np.ndarray:
    raw = shares * owner_count
    counts = np.floor(raw).astype(int)
    short = owner_count - int(counts.sum())
    if short > 0:
        remainders = raw - np.floor(raw)
        # Largest remainder first; ties go to the lower type index.
        order = np.lexsort((np.arange(len(shares)), -remainders))
        counts[order[:short]] += 1
    return counts


def run_scenario(config: ScenarioConfig, params: SystemParams) -> ScenarioReport:
    """Solve, audit, and replay one market.

    Realized profit rescales the simulated owners back to the full population
    so it is directly comparable with the menu's expected profit; with quota
    assignment and shares that divide the owner count evenly, the two agree
    to rounding.
    """
    profiles = build_types(config, params)
    menu = solve(profiles, params)
    audit = feasibility_report(menu.items, profiles, params)
    utilities = utility_matrix(menu.items, profiles, params)
    owner_count = config.owner_count if config.owner_count is not None else params.population
    shares = np.array([profile.probability for profile in profiles])
    if config.assignment == "quota":
        counts = _quota_counts(shares, owner_count)
    else:
        rng = np.random.default_rng(config.seed)
        drawn = rng.choice(len(profiles), size=owner_count, p=shares)
        counts = np.bincount(drawn, minlength=len(profiles))
    selections = np.array(
        [owner_select_item(profile, menu.items, params) for profile in profiles]
    )
    scale = params.population / owner_count
    realized = 0.0
    for n, profile in enumerate(profiles):
        if counts[n] == 0 or selections[n] < 0:
            continue
        realized += counts[n] * scale * publisher_profit_one(profile, menu.items[selections[n]], params)
    return ScenarioReport(
        profiles=profiles,
        menu=menu,
        feasibility=audit,
        utilities=utilities,
        selections=selections,
        type_counts=counts,
        expected_profit=menu.expected_profit,
        realized_profit=realized,
    )


def accuracy_sweep(
    limits: Sequence[float], config: ScenarioConfig, params: SystemParams
) -> list[dict]:
    """Re-run the market while lowering the best available data quality.

    ``limits`` are top quality levels, given from best to worst (equal steps
    allowed).  Each entry rebuilds the type ladder below that ceiling and
    returns expected and realized profit, which should not improve as the
    ceiling drops.
    """
    values = [float(x) for x in limits]
    if any(b > a for a, b in zip(values, values[1:])):
        raise ValueError("quality limits must be non-increasing")
    rows = []
    for limit in values:
        scenario = run_scenario(dataclasses.replace(config, quality_hi=limit), params)
        rows.append(
            {
                "quality_limit": limit,
                "expected_profit": scenario.expected_profit,
                "realized_profit": scenario.realized_profit,
            }
        )
    return rows


def type_count_sweep(
    type_counts: Sequence[int], config: ScenarioConfig, params: SystemParams
) -> list[dict]:
    """Compare contract, first-best, and linear pricing across menu sizes."""
    rows = []
    for m in type_counts:
        if m < 1:
            raise ValueError("type counts must be positive")
        profiles = build_types(dataclasses.replace(config, type_count=int(m)), params)
        menu = solve(profiles, params)
        symmetric = solve_symmetric(profiles, params)
        asymmetric = solve_asymmetric(profiles, params)
        rows.append(
            {
                "type_count": int(m),
                "contract_profit": menu.expected_profit,
                "symmetric_profit": symmetric.expected_profit,
                "asymmetric_profit": asymmetric.expected_profit,
            }
        )
    return rows
