"""Jain and information-theoretic fairness indices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import DomainError


@dataclass(frozen=True)
class FairnessReport:
    jain: float
    info_theoretic: float
    fair_rates: tuple[float, ...]
    deviations: tuple[float, ...]


def jain_array(rates) -> np.ndarray:
    r = np.asarray(rates, dtype=float)
    # scale by the row max so tiny rates do not underflow when squared
    peak = np.max(r, axis=-1, keepdims=True)
    r = r / np.where(peak > 0, peak, 1.0)
    s = r.sum(axis=-1)
    return s * s / (r.shape[-1] * np.sum(r * r, axis=-1))


def jain_index(rates) -> float:
    """``(sum r)^2 / (M sum r^2)``; 1 for equal rates, ``1/M`` for a single winner."""
    r = np.asarray(rates, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise DomainError("rates must be a non-empty vector")
    if np.any(r < 0) or not np.any(r > 0):
        raise DomainError("rates must be non-negative and not all zero")
    return float(jain_array(r))


def it_fairness_array(rates, gains, fractions, power, noise_power):
    """Batch information-theoretic fairness.

    Each user's fair rate is its interference-free rate rescaled so the fair
    rates add up to the achieved sum rate. The index is one minus the unbiased
    mean-square deviation from the fair rates over ``R_s^2 / M``, clipped to
    ``[0, 1]``. Returns ``(index, fair_rates, squared_deviations)``.
    """
    r = np.asarray(rates, dtype=float)
    g = np.asarray(gains, dtype=float)
    beta = np.asarray(fractions, dtype=float)
    p = np.asarray(power, dtype=float)[..., None]
    M = r.shape[-1]
    solo = np.log2(1.0 + p * g * beta / noise_power)
    rs = r.sum(axis=-1, keepdims=True)
    rc = solo.sum(axis=-1, keepdims=True)
    fair = solo * rs / rc
    dev2 = (fair - r) ** 2
    mean_dev = dev2.sum(axis=-1) / (M - 1)
    mean_sq = rs[..., 0] ** 2 / M
    return np.clip(1.0 - mean_dev / mean_sq, 0.0, 1.0), fair, dev2


def it_fairness(rates, fractions, power: float, channels: ChannelRealization) -> FairnessReport:
    r = np.asarray(rates, dtype=float)
    M = channels.user_count
    if M < 2:
        raise DomainError("information-theoretic fairness needs at least two users")
    if r.shape != (M,) or np.asarray(fractions).shape != (M,):
        raise DomainError("one rate and one fraction per user are required")
    if not r.sum() > 0:
        raise DomainError("sum rate must be > 0")
    idx, fair, dev2 = it_fairness_array(r, channels.as_array(), fractions, power, channels.noise_power)
    return FairnessReport(jain_index(r), float(idx), tuple(fair.tolist()), tuple(dev2.tolist()))
