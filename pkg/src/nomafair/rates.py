"""SINR and rate arithmetic under perfect SIC, power and efficiency metrics.

User ``m`` (0-based here, gains sorted ascending) decodes and removes the
signals of weaker users and sees the stronger users' signals as noise. The
strongest user sees noise only. The array helpers accept gains of shape
``(..., M)`` and broadcast the power over the leading axes, so they serve
both single realizations and Monte Carlo batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import DomainError


@dataclass(frozen=True)
class PowerModel:
    amplifier_inefficiency: float = 1.4
    circuit_power_per_user: float = 0.25
    power_budget: float = 120.0

    def __post_init__(self):
        if not self.amplifier_inefficiency >= 1:
            raise DomainError("amplifier inefficiency must be >= 1")
        if not self.circuit_power_per_user >= 0:
            raise DomainError("circuit power must be >= 0")
        if not self.power_budget > 0:
            raise DomainError("power budget must be > 0")


@dataclass(frozen=True)
class Allocation:
    total_power: float
    fractions: tuple[float, ...]
    rates: tuple[float, ...]

    @classmethod
    def evaluate(cls, total_power, fractions, channels: ChannelRealization) -> "Allocation":
        """Allocation with its per-user rates filled in."""
        beta = np.asarray(fractions, dtype=float)
        if beta.shape != (channels.user_count,):
            raise DomainError("one fraction per user is required")
        if not total_power > 0 or np.any(beta < 0):
            raise DomainError("power must be > 0 and fractions >= 0")
        r = user_rates(channels.as_array(), beta, total_power, channels.noise_power)
        return cls(float(total_power), tuple(beta.tolist()), tuple(r.tolist()))

    @property
    def sum_rate(self) -> float:
        return math.fsum(self.rates)

    @property
    def user_count(self) -> int:
        return len(self.fractions)


def _tail_sums(beta: np.ndarray) -> np.ndarray:
    """``sum(beta[..., m+1:])`` for every m."""
    rev = np.cumsum(beta[..., ::-1], axis=-1)[..., ::-1]
    return rev - beta


def sinr_array(gains, fractions, power, noise_power) -> np.ndarray:
    g = np.asarray(gains, dtype=float)
    beta = np.asarray(fractions, dtype=float)
    p = np.asarray(power, dtype=float)[..., None]
    signal = p * g * beta
    interference = p * g * _tail_sums(beta)
    return signal / (interference + noise_power)


def user_rates(gains, fractions, power, noise_power) -> np.ndarray:
    return np.log2(1.0 + sinr_array(gains, fractions, power, noise_power))


def sinr(m: int, fractions, power: float, channels: ChannelRealization) -> float:
    """SINR of user ``m`` (1-based, weakest user is 1)."""
    M = channels.user_count
    if not 1 <= m <= M:
        raise DomainError(f"user index {m} outside 1..{M}")
    gam = sinr_array(channels.as_array(), fractions, power, channels.noise_power)
    return float(gam[m - 1])


def user_rate(gamma):
    """Shannon rate ``log2(1 + gamma)`` in bit/s/Hz."""
    if np.any(np.asarray(gamma) < 0):
        raise DomainError("SINR must be >= 0")
    return np.log2(1.0 + gamma)


def rates_for_allocation(alloc: Allocation, channels: ChannelRealization):
    """Per-user rates and their sum for ``alloc`` on ``channels``."""
    r = user_rates(channels.as_array(), alloc.fractions, alloc.total_power, channels.noise_power)
    return r, math.fsum(r.tolist())


def consumed_power_array(fraction_sum, power, user_count, pm: PowerModel):
    return pm.amplifier_inefficiency * fraction_sum * power + user_count * pm.circuit_power_per_user


def consumed_power(alloc: Allocation, pm: PowerModel) -> float:
    """Amplifier-scaled transmit power plus per-user circuit power, in watts."""
    radiated = math.fsum(b * alloc.total_power for b in alloc.fractions)
    return pm.amplifier_inefficiency * radiated + alloc.user_count * pm.circuit_power_per_user


def energy_efficiency(sum_rate, consumed):
    if np.any(np.asarray(consumed) <= 0):
        raise DomainError("consumed power must be > 0")
    return sum_rate / consumed


def resource_efficiency(ee, se, xi0):
    """Weighted sum ``xi0 * EE + SE``; ``xi0`` is in watts."""
    if np.any(np.asarray(xi0) < 0):
        raise DomainError("xi0 must be >= 0")
    return xi0 * ee + se


def ica_fractions(gains) -> np.ndarray:
    """Inverse-channel fractions, normalized to sum to one along the last axis."""
    g = np.asarray(gains, dtype=float)
    inv = 1.0 / g
    return inv / inv.sum(axis=-1, keepdims=True)


def ica_allocation(channels: ChannelRealization) -> tuple[float, ...]:
    return tuple(ica_fractions(channels.as_array()).tolist())
