"""Time, energy, profit, and utility formulas of the data market.

A task publisher posts a federated-learning task to a population of mobile
data owners.  Per global iteration an owner runs ``log(1/quality)`` local
training passes over its samples and uploads one model update, so its time
and energy bills split into a computation part scaled by the iteration count
and a fixed communication part.  Everything here is a pure function in
dimensionless toy units; every other module builds on this one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleTimeError

#: Default channel gain; with the default power/noise it makes the SNR term
#: equal e - 1, so the derived link rate is exactly 1 and the derived
#: communication time/energy coincide with the override defaults below.
_DEFAULT_GAIN = (math.e - 1.0) / 2.0


@dataclass(frozen=True)
class SystemParams:
    """Global market constants.  Defaults reproduce the reference experiment
    setup: 100 owners, deadline 600, reward budget 10000, communication time
    10 and energy 20 per update."""

    bandwidth: float = 1.0
    tx_power: float = 2.0
    channel_gain: float = _DEFAULT_GAIN
    noise_power: float = 1.0
    update_size: float = 10.0
    capacitance: float = 0.5
    iteration_coeff: float = 1.0
    satisfaction_weight: float = 1500.0
    reward_unit_cost: float = 1.0
    energy_weight: float = 1.0
    t_max: float = 600.0
    r_max: float = 10_000.0
    population: int = 100
    tcom_override: float | None = 10.0
    ecom_override: float | None = 20.0

    def __post_init__(self):
        for name in (
            "bandwidth",
            "tx_power",
            "channel_gain",
            "noise_power",
            "update_size",
            "capacitance",
            "iteration_coeff",
            "satisfaction_weight",
            "reward_unit_cost",
            "energy_weight",
            "t_max",
            "r_max",
        ):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"SystemParams.{name} must be strictly positive, got {value!r}")
        if self.population < 1:
            raise ValueError(f"SystemParams.population must be >= 1, got {self.population}")
        for name in ("tcom_override", "ecom_override"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ValueError(f"SystemParams.{name} must be strictly positive when set")
        if self.t_max <= effective_comm_time(self):
            raise ValueError(
                "SystemParams.t_max must strictly exceed the per-update communication time "
                f"({effective_comm_time(self)!r})"
            )


@dataclass(frozen=True)
class TypeProfile:
    """One data-owner type: quality level, derived type value, population
    share, and per-sample computation cost."""

    index: int
    quality: float
    type_value: float
    probability: float
    cpu_cycles: float
    samples: float

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("TypeProfile.index is a 1-based rank")
        if not 0.0 < self.quality < 1.0:
            raise ValueError(f"TypeProfile.quality must lie in (0, 1), got {self.quality!r}")
        if not self.type_value > 0.0:
            raise ValueError("TypeProfile.type_value must be strictly positive")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("TypeProfile.probability must lie in [0, 1]")
        if not (self.cpu_cycles > 0.0 and self.samples > 0.0):
            raise ValueError("TypeProfile cpu_cycles and samples must be strictly positive")


@dataclass(frozen=True)
class ContractItem:
    """One menu entry: contributed CPU frequency and the reward paid for it."""

    cpu_freq: float
    reward: float

    def __post_init__(self):
        if not self.cpu_freq > 0.0:
            raise ValueError("ContractItem.cpu_freq must be strictly positive")
        if self.reward < 0.0:
            raise ValueError("ContractItem.reward must be nonnegative")


def _check_quality(quality: float) -> None:
    if not 0.0 < quality < 1.0:
        raise ValueError(f"data quality must lie in the open interval (0, 1), got {quality!r}")


def local_iterations(quality: float) -> float:
    """Local training iterations per global round, ``ln(1/quality)``.

    Strictly decreasing in quality: better local data needs fewer passes.
    """
    _check_quality(quality)
    return math.log(1.0 / quality)


def type_from_quality(quality: float, iteration_coeff: float) -> float:
    """Type value of an owner, the iteration coefficient over its iteration count."""
    _check_quality(quality)
    if not iteration_coeff > 0.0:
        raise ValueError("iteration_coeff must be strictly positive")
    return iteration_coeff / math.log(1.0 / quality)


def computation_time(cpu_cycles: float, samples: float, cpu_freq: float) -> float:
    """Wall time of one local training pass: cycles per sample times samples over frequency."""
    if min(cpu_cycles, samples, cpu_freq) <= 0.0:
        raise ValueError("cpu_cycles, samples and cpu_freq must be strictly positive")
    return cpu_cycles * samples / cpu_freq


def computation_energy(capacitance: float, cpu_cycles: float, samples: float, cpu_freq: float) -> float:
    """Chipset energy of one local training pass; quadratic in the CPU frequency."""
    if min(capacitance, cpu_cycles, samples, cpu_freq) <= 0.0:
        raise ValueError("all computation-energy inputs must be strictly positive")
    return capacitance * cpu_cycles * samples * cpu_freq * cpu_freq


def transmission_rate(bandwidth: float, tx_power: float, channel_gain: float, noise_power: float) -> float:
    """Uplink rate ``bandwidth * ln(1 + snr)`` of the owner-to-publisher link."""
    if min(bandwidth, tx_power, channel_gain, noise_power) <= 0.0:
        raise ValueError("all transmission-rate inputs must be strictly positive")
    return bandwidth * math.log(1.0 + tx_power * channel_gain / noise_power)


def transmission_time(update_size: float, rate: float) -> float:
    """Upload time of one model update of the given size."""
    if min(update_size, rate) <= 0.0:
        raise ValueError("update_size and rate must be strictly positive")
    return update_size / rate


def communication_energy(update_size: float, rate: float, tx_power: float) -> float:
    """Radio energy of one update upload: transmission time times power."""
    return transmission_time(update_size, rate) * _positive(tx_power, "tx_power")


def _positive(value: float, name: str) -> float:
    if value <= 0.0:
        raise ValueError(f"{name} must be strictly positive")
    return value


def effective_comm_time(params: SystemParams) -> float:
    """Per-update communication time; the explicit override wins over the derived value."""
    if params.tcom_override is not None:
        return params.tcom_override
    rate = transmission_rate(params.bandwidth, params.tx_power, params.channel_gain, params.noise_power)
    return transmission_time(params.update_size, rate)


def effective_comm_energy(params: SystemParams) -> float:
    """Per-update communication energy; the explicit override wins over the derived value."""
    if params.ecom_override is not None:
        return params.ecom_override
    rate = transmission_rate(params.bandwidth, params.tx_power, params.channel_gain, params.noise_power)
    return communication_energy(params.update_size, rate, params.tx_power)


def iteration_ratio(profile: TypeProfile, params: SystemParams) -> float:
    """Local iteration count expressed through the type, iteration_coeff / type_value."""
    return params.iteration_coeff / profile.type_value


def total_iteration_time(profile: TypeProfile, item: ContractItem, params: SystemParams) -> float:
    """Total time of one global iteration: all local passes plus the upload."""
    compute = computation_time(profile.cpu_cycles, profile.samples, item.cpu_freq)
    return iteration_ratio(profile, params) * compute + effective_comm_time(params)


def total_iteration_energy(profile: TypeProfile, item: ContractItem, params: SystemParams) -> float:
    """Total energy of one global iteration: all local passes plus the upload."""
    energy = computation_energy(params.capacitance, profile.cpu_cycles, profile.samples, item.cpu_freq)
    return iteration_ratio(profile, params) * energy + effective_comm_energy(params)


def publisher_profit_one(profile: TypeProfile, item: ContractItem, params: SystemParams) -> float:
    """Publisher profit from one signed item: log satisfaction in the slack
    before the deadline, minus the reward bill."""
    slack = params.t_max - total_iteration_time(profile, item, params)
    if slack <= 0.0:
        raise InfeasibleTimeError(
            f"iteration time {params.t_max - slack!r} reaches the deadline t_max={params.t_max!r}"
        )
    return params.satisfaction_weight * math.log(slack) - params.reward_unit_cost * item.reward


def owner_utility(profile: TypeProfile, item: ContractItem, params: SystemParams) -> float:
    """Owner utility: reward minus the energy-weighted total iteration cost."""
    return item.reward - params.energy_weight * total_iteration_energy(profile, item, params)
