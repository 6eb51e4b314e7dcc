"""Minimum-power equal-rate allocation (ERPA).

Giving every user the same rate ``R`` pins each power fraction once the total
power ``P`` is fixed: with ``t = 2^R - 1`` and ``a_m = noise / |h_m|^2``,

    beta_M = t * a_M / P
    beta_m = t * (sum(beta_{m+1:}) + a_m / P)

The fractions must also sum to one, which fixes ``P``. Unrolling the
recursion gives the closed form

    P* = t * sum_m a_m * 2^(R (m - 1))

(1-based ``m``). ``min_power_numeric`` finds the same root by bisection on
the sum-to-one residual and is kept as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import BracketError, BudgetExceededError, DomainError
from .rates import PowerModel, user_rates
from .search import bisect_decreasing


@dataclass(frozen=True)
class ErpaSolution:
    target_rate: float
    min_power: float
    fractions: tuple[float, ...]
    residual: float
    rates: tuple[float, ...]

    @property
    def user_count(self) -> int:
        return len(self.fractions)

    @property
    def sum_rate(self) -> float:
        return self.user_count * self.target_rate


def _check_rate(rate):
    if np.any(~(np.asarray(rate, dtype=float) > 0)):
        raise DomainError("target rate must be > 0")


def beta_recursion_array(rate, power, gains, noise_power) -> np.ndarray:
    """Fractions from the equal-rate recursion, broadcast over leading axes.

    ``rate`` and ``power`` have the batch shape of ``gains[..., 0]``.
    """
    g = np.asarray(gains, dtype=float)
    t = np.expm1(np.asarray(rate, dtype=float) * math.log(2.0))
    a_over_p = noise_power / (g * np.asarray(power, dtype=float)[..., None])
    beta = np.empty_like(a_over_p)
    tail = np.zeros(a_over_p.shape[:-1])
    for m in range(g.shape[-1] - 1, -1, -1):
        beta[..., m] = t * (tail + a_over_p[..., m])
        tail = tail + beta[..., m]
    return beta


def beta_recursion(rate: float, power: float, channels: ChannelRealization) -> tuple[float, ...]:
    """Fractions forced by rate ``rate`` at total power ``power``; not normalized."""
    _check_rate(rate)
    if not power > 0:
        raise DomainError("power must be > 0")
    b = beta_recursion_array(rate, power, channels.as_array(), channels.noise_power)
    return tuple(b.tolist())


def constraint_residual(rate: float, power: float, channels: ChannelRealization) -> float:
    """``sum(beta) - 1`` for the recursion fractions; zero at the optimum power."""
    return math.fsum(beta_recursion(rate, power, channels)) - 1.0


def sum_constraint(fractions, power: float, rate: float, channels: ChannelRealization) -> float:
    """The sum-to-one constraint with the rate equalities substituted in.

    Unlike :func:`constraint_residual` the fractions are free variables here,
    which is the form whose curvature in ``(beta, P)`` is examined in the tests.
    """
    beta = np.asarray(fractions, dtype=float)
    t = math.expm1(rate * math.log(2.0))
    a = channels.noise_power / channels.as_array()
    tails = np.cumsum(beta[::-1])[::-1] - beta
    return float(np.sum(t * tails[:-1] + t * a[:-1] / power) + t * a[-1] / power - 1.0)


def min_power_array(rate, gains, noise_power) -> np.ndarray:
    """Closed-form minimum power for each row of ``gains``."""
    g = np.asarray(gains, dtype=float)
    r = np.asarray(rate, dtype=float)
    m = np.arange(g.shape[-1])
    t = np.expm1(r * math.log(2.0))
    with np.errstate(over="ignore"):
        weights = np.exp2(r[..., None] * m)
        return t * np.sum(noise_power / g * weights, axis=-1)


def min_power_closed_form(rate: float, channels: ChannelRealization) -> float:
    _check_rate(rate)
    return float(min_power_array(rate, channels.as_array(), channels.noise_power))


def min_power_numeric(rate: float, channels: ChannelRealization, tol: float = 1e-10,
                      max_power: float | None = None) -> float:
    """Minimum power by bisection on :func:`constraint_residual`.

    The bracket starts at ``[1e-12, 1]`` W and the upper end doubles until the
    residual turns negative. ``tol`` is relative to the root. Raises
    :class:`BracketError` when the upper end passes ``max_power``.
    """
    _check_rate(rate)
    if not tol > 0:
        raise DomainError("tol must be > 0")
    lo, hi = 1e-12, 1.0
    if constraint_residual(rate, lo, channels) <= 0:
        raise BracketError("residual is not positive at the lower bracket end")
    cap = math.inf if max_power is None else max_power
    while constraint_residual(rate, hi, channels) >= 0:
        hi *= 2.0
        if hi > cap or not math.isfinite(hi):
            raise BracketError(f"no sign change below {min(hi, cap):.6g} W")

    def f(p):
        return np.array([constraint_residual(rate, float(p[0]), channels)])

    return float(bisect_decreasing(f, lo, hi, rtol=tol)[0])


def solve_erpa(rate: float, channels: ChannelRealization, pm: PowerModel | None = None) -> ErpaSolution:
    """Minimum total power and fractions giving every user rate ``rate``.

    Raises :class:`BudgetExceededError` if the power exceeds ``pm.power_budget``.
    """
    _check_rate(rate)
    p_star = min_power_closed_form(rate, channels)
    if pm is not None and p_star > pm.power_budget:
        raise BudgetExceededError(p_star, pm.power_budget)
    beta = np.asarray(beta_recursion(rate, p_star, channels))
    residual = math.fsum(beta.tolist()) - 1.0
    # sum is one up to rounding; renormalize so the allocation is exact
    beta = beta / math.fsum(beta.tolist())
    r = user_rates(channels.as_array(), beta, p_star, channels.noise_power)
    if not np.allclose(r, rate, rtol=0, atol=1e-6):
        raise ArithmeticError(f"rate round trip failed: {r} vs {rate}")
    return ErpaSolution(float(rate), p_star, tuple(beta.tolist()), residual, tuple(r.tolist()))
