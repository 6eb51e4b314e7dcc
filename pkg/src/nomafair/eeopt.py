"""Energy-efficiency maximization along the equal-rate allocation curve.

For a common rate ``R`` the ERPA power ``P*(R)`` is unique, so the energy
efficiency is a function of ``R`` alone:

    EE(R) = M R / (rho P*(R) + M Pc)

Dinkelbach's method replaces the ratio by the parametric difference
``U_R - q U_T`` and updates ``q`` to the achieved ratio until the best
difference drops below ``eps``. For the joint problem the inner step is a
golden-section search over ``R``; ``P*(R)`` is convex, so the inner objective
is concave. The batch engine runs many realizations in lock step and is what
the simulator uses; :func:`dinkelbach_joint` wraps it for one realization and
keeps the iteration trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .channel import ChannelRealization
from .erpa import min_power_array, min_power_closed_form
from .errors import BracketError, BudgetExceededError, ConvergenceError, DomainError
from .rates import PowerModel
from .search import bisect_decreasing, golden_max

DEFAULT_BRACKET = (1e-3, 12.0)
DEFAULT_EPS = 1e-8
GOLDEN_XTOL = 1e-6
MAX_ITER = 50

# batch status codes
OK = 0
INFEASIBLE = 1
BOUNDARY_LOW = 2
BOUNDARY_HIGH = 3
NOT_CONVERGED = 4
STATUS_NAMES = {OK: "ok", INFEASIBLE: "budget", BOUNDARY_LOW: "boundary_low",
                BOUNDARY_HIGH: "boundary_high", NOT_CONVERGED: "not_converged"}


@dataclass(frozen=True)
class EeSolution:
    optimal_rate: float
    optimal_power: float
    q_star: float
    user_count: int
    iterations: list = field(default_factory=list)  # (n, q, P, R) per outer step
    converged: bool = True
    at_budget: bool = False

    @property
    def sum_rate(self) -> float:
        return self.user_count * self.optimal_rate


class OracleResult(NamedTuple):
    rate: float
    ee: float
    boundary: bool
    at_budget: bool


def ee_of_rate_array(rate, gains, noise_power, pm: PowerModel):
    g = np.asarray(gains, dtype=float)
    M = g.shape[-1]
    p = min_power_array(rate, g, noise_power)
    return M * np.asarray(rate) / (pm.amplifier_inefficiency * p + M * pm.circuit_power_per_user)


def ee_of_rate(rate: float, channels: ChannelRealization, pm: PowerModel) -> float:
    """Energy efficiency of the equal-rate allocation at per-user rate ``rate``."""
    p = min_power_closed_form(rate, channels)
    if p > pm.power_budget:
        raise BudgetExceededError(p, pm.power_budget)
    M = channels.user_count
    return M * rate / (pm.amplifier_inefficiency * p + M * pm.circuit_power_per_user)


def dinkelbach_fixed_rate(rate: float, channels: ChannelRealization, pm: PowerModel,
                          eps: float = DEFAULT_EPS, max_iter: int = MAX_ITER) -> EeSolution:
    """Dinkelbach iteration at a fixed per-user rate.

    The equal-rate constraints leave a single feasible power, so the inner
    step is an evaluation and the loop stops on the second pass.
    """
    if not eps > 0:
        raise DomainError("eps must be > 0")
    M = channels.user_count
    p = min_power_closed_form(rate, channels)
    if p > pm.power_budget:
        raise BudgetExceededError(p, pm.power_budget)
    u_r = M * rate
    u_t = pm.amplifier_inefficiency * p + M * pm.circuit_power_per_user
    q = 0.0
    trace = []
    for n in range(max_iter):
        trace.append((n, q, p, rate))
        if u_r - q * u_t <= eps:
            return EeSolution(rate, p, u_r / u_t, M, trace, True)
        q = u_r / u_t
    raise ConvergenceError("fixed-rate Dinkelbach did not converge", trace)


def budget_rate_array(gains, noise_power, budget, lo, hi):
    """Largest per-user rate in ``[lo, hi]`` whose ERPA power fits the budget.

    NaN where even ``lo`` is over budget.
    """
    g = np.asarray(gains, dtype=float)
    n = g.shape[0]
    lo_a = np.full(n, lo, dtype=float)
    hi_a = np.full(n, hi, dtype=float)
    if not math.isfinite(budget):
        return hi_a
    p_hi = min_power_array(hi_a, g, noise_power)
    p_lo = min_power_array(lo_a, g, noise_power)
    out = hi_a.copy()
    need = p_hi > budget
    if np.any(need):
        idx = np.flatnonzero(need)

        def f(r):
            return budget - min_power_array(r, g[idx], noise_power)

        # f > 0 below the root, so it is decreasing in r
        out[idx] = bisect_decreasing(f, lo_a[idx], hi_a[idx], rtol=1e-13)
    out[p_lo > budget] = np.nan
    return out


def dinkelbach_joint_batch(gains, noise_power, pm: PowerModel, eps=DEFAULT_EPS,
                           rate_bracket=DEFAULT_BRACKET, xtol=GOLDEN_XTOL,
                           max_iter=MAX_ITER, keep_trace=False):
    """Joint rate/power Dinkelbach for every row of ``gains`` (shape ``(n, M)``).

    Returns a dict of arrays: ``rate``, ``power``, ``ee``, ``q``, ``iterations``,
    ``status`` (see ``STATUS_NAMES``) and ``at_budget``; with ``keep_trace``
    also ``trace``, a list of ``(q, P, R)`` arrays per outer iteration (NaN
    for rows already finished).
    """
    g = np.atleast_2d(np.asarray(gains, dtype=float))
    n, M = g.shape
    lo, hi = map(float, rate_bracket)
    if not (0 < lo < hi):
        raise DomainError("rate bracket must satisfy 0 < lo < hi")
    if not eps > 0:
        raise DomainError("eps must be > 0")
    rho, mpc = pm.amplifier_inefficiency, M * pm.circuit_power_per_user

    hi_eff = budget_rate_array(g, noise_power, pm.power_budget, lo, hi)
    status = np.full(n, NOT_CONVERGED, dtype=np.int8)
    status[np.isnan(hi_eff)] = INFEASIBLE
    capped = hi_eff < hi

    rate = np.full(n, np.nan)
    power = np.full(n, np.nan)
    q_final = np.full(n, np.nan)
    iters = np.zeros(n, dtype=np.int32)
    q = np.zeros(n)
    active = status == NOT_CONVERGED
    trace = []
    for it in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        gi, qi = g[idx], q[idx]

        def objective(r):
            return M * r - qi * (rho * min_power_array(r, gi, noise_power) + mpc)

        r = golden_max(objective, np.full(idx.size, lo), hi_eff[idx], xtol=xtol)
        p = min_power_array(r, gi, noise_power)
        u_r = M * r
        u_t = rho * p + mpc
        gap = u_r - qi * u_t
        if keep_trace:
            step = np.full((3, n), np.nan)
            step[:, idx] = (qi, p, r)
            trace.append(step)
        done = gap <= eps
        fin = idx[done]
        rate[fin], power[fin], q_final[fin] = r[done], p[done], qi[done]
        iters[idx] = it + 1
        status[fin] = OK
        active[fin] = False
        q[idx[~done]] = (u_r / u_t)[~done]

    ok = status == OK
    ee = np.full(n, np.nan)
    ee[ok] = M * rate[ok] / (rho * power[ok] + mpc)
    tol = 2.0 * xtol
    low = ok & (rate - lo <= tol)
    top = ok & (hi_eff - rate <= tol)
    status[low] = BOUNDARY_LOW
    status[top & ~capped] = BOUNDARY_HIGH
    at_budget = top & capped & ~low
    out = {"rate": rate, "power": power, "ee": ee, "q": q_final, "iterations": iters,
           "status": status, "at_budget": at_budget}
    if keep_trace:
        out["trace"] = trace
    return out


def dinkelbach_joint(channels: ChannelRealization, pm: PowerModel, eps: float = DEFAULT_EPS,
                     rate_bracket=DEFAULT_BRACKET, max_iter: int = MAX_ITER) -> EeSolution:
    """EE-optimal common rate and power for one realization.

    The returned ``q_star`` is the ratio at the returned point; the trace
    keeps the Dinkelbach parameters ``q^(n)`` themselves. A maximizer sitting
    on a bracket end is rejected with :class:`BracketError`; one sitting on
    the power budget is a valid constrained optimum and flagged ``at_budget``.
    """
    res = dinkelbach_joint_batch(channels.as_array()[None, :], channels.noise_power, pm, eps,
                                 rate_bracket, max_iter=max_iter, keep_trace=True)
    trace = [(n, float(s[0, 0]), float(s[1, 0]), float(s[2, 0])) for n, s in enumerate(res["trace"])]
    st = int(res["status"][0])
    if st == INFEASIBLE:
        lo = float(rate_bracket[0])
        raise BudgetExceededError(min_power_closed_form(lo, channels), pm.power_budget)
    if st == NOT_CONVERGED:
        raise ConvergenceError(f"no convergence in {max_iter} Dinkelbach iterations", trace)
    if st in (BOUNDARY_LOW, BOUNDARY_HIGH):
        end = "lower" if st == BOUNDARY_LOW else "upper"
        raise BracketError(f"EE maximizer sits on the {end} end of the rate bracket {tuple(rate_bracket)}")
    return EeSolution(float(res["rate"][0]), float(res["power"][0]), float(res["ee"][0]),
                      channels.user_count, trace, True, bool(res["at_budget"][0]))


def ee_max_oracle(channels: ChannelRealization, pm: PowerModel, rate_bracket=DEFAULT_BRACKET,
                  tol: float = 1e-10, grid_points: int = 1000) -> OracleResult:
    """Grid scan plus bounded Brent refinement of ``EE(R)``.

    Shares nothing with the Dinkelbach path beyond the closed-form power.
    """
    lo, hi = map(float, rate_bracket)
    g = channels.as_array()
    s2 = channels.noise_power
    budget = pm.power_budget

    def p_of(r):
        return float(min_power_array(r, g, s2))

    if p_of(lo) > budget:
        raise BudgetExceededError(p_of(lo), budget)
    top = hi
    if math.isfinite(budget) and p_of(hi) > budget:
        top = brentq(lambda r: p_of(r) - budget, lo, hi, xtol=1e-14, rtol=1e-14)
    grid = np.linspace(lo, top, grid_points)
    ee = ee_of_rate_array(grid, np.broadcast_to(g, (grid_points, g.size)), s2, pm)
    i = int(np.argmax(ee))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]

    def neg(r):
        return -float(ee_of_rate_array(r, g, s2, pm))

    res = minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": tol})
    r_best, ee_best = float(res.x), -float(res.fun)
    # the bounded method never probes the ends; keep a better endpoint if it wins
    for edge in (a, b):
        v = -neg(edge)
        if v > ee_best:
            r_best, ee_best = float(edge), v
    edge_tol = 1e-6
    boundary = r_best - lo <= edge_tol or (top == hi and hi - r_best <= edge_tol)
    at_budget = top < hi and top - r_best <= edge_tol
    return OracleResult(r_best, ee_best, bool(boundary), bool(at_budget))
