"""Seeded Monte Carlo experiments over rate, user count, radius and EE curves.

Samples are drawn in fixed-size chunks. Chunk ``j`` of trial ``k`` for a
layout with ``M`` users uses the seed sequence
``SeedSequence(master_seed, spawn_key=(M, k, j))``, so every chunk can be
evaluated on any worker and the aggregate is a pure function of the config.
Sweep points that share a layout (different rates, different radii) see the
same random draws, which keeps the swept curves smooth.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import eeopt
from .channel import Fading, PlacementSpec, degenerate_rows, realize_gains
from .erpa import beta_recursion_array, min_power_array
from .errors import ConfigError
from .fairness import it_fairness_array, jain_array
from .rates import PowerModel, ica_fractions, user_rates

CHUNK_SIZE = 2500
METRICS = ("P", "Rs", "EE", "RE", "FJ", "FIT")


class SweepKind(str, Enum):
    RATE = "rate"
    USERS = "users"
    RADIUS = "radius"
    EE_CURVE = "ee-curve"


class Strategy(str, Enum):
    ERPA = "erpa"
    ICA = "ica"
    BOTH = "both"


@dataclass(frozen=True)
class Scenario:
    placement: PlacementSpec
    alpha: float = 2.0
    noise_power: float = 1e-6
    fading: Fading = Fading.RAYLEIGH

    def __post_init__(self):
        object.__setattr__(self, "fading", Fading(self.fading))
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError("alpha must be > 0")
        if not (math.isfinite(self.noise_power) and self.noise_power > 0):
            raise ConfigError("noise power must be > 0")


@dataclass(frozen=True)
class Sweep:
    kind: SweepKind
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", SweepKind(self.kind))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ConfigError(f"{self.kind.value} sweep needs at least one value")
        if any(not (math.isfinite(v) and v > 0) for v in self.values):
            raise ConfigError("sweep values must be finite and > 0")
        if self.kind is SweepKind.USERS and any(v != int(v) or v < 2 for v in self.values):
            raise ConfigError("user counts must be integers >= 2")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    sweep: Sweep
    power_model: PowerModel = field(default_factory=PowerModel)
    strategy: Strategy = Strategy.ERPA
    samples: int = 10_000
    trials: int = 5
    master_seed: int = 0
    xi0: float = 1.8
    rate_bracket: tuple[float, float] = eeopt.DEFAULT_BRACKET
    eps: float = eeopt.DEFAULT_EPS

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.samples < 1 or self.trials < 1:
            raise ConfigError("samples and trials must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if not self.xi0 >= 0:
            raise ConfigError("xi0 must be >= 0")
        lo, hi = self.rate_bracket
        if not 0 < lo < hi:
            raise ConfigError("rate bracket must satisfy 0 < lo < hi")
        kind = self.sweep.kind
        if kind is not SweepKind.RATE and self.strategy is not Strategy.ERPA:
            raise ConfigError(f"strategy {self.strategy.value} is only valid for rate sweeps")
        if kind in (SweepKind.USERS, SweepKind.RADIUS) and not self.scenario.placement.is_disc:
            raise ConfigError(f"{kind.value} sweep needs a uniform-disc placement")
        if kind is not SweepKind.USERS and self.scenario.placement.user_count < 2:
            raise ConfigError("at least two users are required")

    def placement_for(self, value: float) -> PlacementSpec:
        pl = self.scenario.placement
        if self.sweep.kind is SweepKind.USERS:
            return PlacementSpec.disc(pl.radius, int(value))
        if self.sweep.kind is SweepKind.RADIUS:
            return PlacementSpec.disc(value, pl.user_count)
        return pl


@dataclass
class Stat:
    mean: float | None
    std: float | None
    trial_std: float | None


@dataclass
class PointResult:
    sweep_value: float
    strategy: str
    accepted: int
    rejected: dict
    stats: dict  # metric name -> Stat
    beta_mean: list
    beta_std: list
    matched_power: float | None = None


@dataclass
class ExperimentAggregate:
    config: ExperimentConfig
    points: list
    total_samples: int
    metadata: dict = field(default_factory=dict)

    def point(self, value, strategy="erpa") -> PointResult:
        for p in self.points:
            if p.strategy == strategy and math.isclose(p.sweep_value, value, rel_tol=1e-12):
                return p
        raise KeyError((value, strategy))

    def series(self, metric, strategy="erpa"):
        """``(sweep values, means)`` of one metric, in sweep order."""
        pts = [p for p in self.points if p.strategy == strategy]
        return [p.sweep_value for p in pts], [p.stats[metric].mean for p in pts]


# ---------------------------------------------------------------- sampling

def chunk_sizes(samples: int, chunk: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(samples, chunk)
    return [chunk] * full + ([rest] if rest else [])


def chunk_rng(master_seed: int, users: int, trial: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(users, trial, chunk))
    return np.random.Generator(np.random.PCG64(ss))


def _draw(cfg: ExperimentConfig, placement: PlacementSpec, trial: int, chunk: int, size: int):
    rng = chunk_rng(cfg.master_seed, placement.user_count, trial, chunk)
    sc = cfg.scenario
    return realize_gains(placement, sc.alpha, sc.fading, rng, size)


def _erpa_metrics(cfg: ExperimentConfig, gains: np.ndarray, rate: float) -> dict:
    s2 = cfg.scenario.noise_power
    pm = cfg.power_model
    n, M = gains.shape
    bad = degenerate_rows(gains)
    g = np.where(bad[:, None], 1.0, gains)
    r = np.full(n, rate)
    p = min_power_array(r, g, s2)
    over = ~bad & ~(p <= pm.power_budget)
    beta = beta_recursion_array(r, p, g, s2)
    beta = beta / beta.sum(axis=-1, keepdims=True)
    rates = user_rates(g, beta, p, s2)
    return _score(cfg, g, beta, p, rates, {"degenerate": bad, "budget": over})


def _score(cfg, gains, beta, power, rates, reject_masks) -> dict:
    pm = cfg.power_model
    M = gains.shape[1]
    rs = rates.sum(axis=-1)
    u_t = pm.amplifier_inefficiency * beta.sum(axis=-1) * power + M * pm.circuit_power_per_user
    ee = rs / u_t
    fit, _, _ = it_fairness_array(rates, gains, beta, power, cfg.scenario.noise_power)
    keep = np.ones(len(power), dtype=bool)
    for m in reject_masks.values():
        keep &= ~m
    return {
        "P": power[keep], "Rs": rs[keep], "EE": ee[keep], "RE": cfg.xi0 * ee[keep] + rs[keep],
        "FJ": jain_array(rates[keep]), "FIT": fit[keep], "beta": beta[keep], "gains": gains[keep],
        "rejected": {k: int(np.count_nonzero(v)) for k, v in reject_masks.items()},
    }


def _joint_metrics(cfg: ExperimentConfig, gains: np.ndarray) -> dict:
    s2 = cfg.scenario.noise_power
    bad = degenerate_rows(gains)
    g = np.where(bad[:, None], 1.0, gains)
    res = eeopt.dinkelbach_joint_batch(g, s2, cfg.power_model, cfg.eps, cfg.rate_bracket)
    st = res["status"]
    masks = {"degenerate": bad}
    for code, name in eeopt.STATUS_NAMES.items():
        if code != eeopt.OK:
            masks[name] = ~bad & (st == code)
    ok = ~bad & (st == eeopt.OK)
    r = np.where(ok, res["rate"], 1.0)
    p = np.where(ok, res["power"], 1.0)
    beta = beta_recursion_array(r, p, g, s2)
    beta = beta / beta.sum(axis=-1, keepdims=True)
    rates = user_rates(g, beta, p, s2)
    out = _score(cfg, g, beta, p, rates, masks)
    out["at_budget"] = int(np.count_nonzero(res["at_budget"] & ok))
    return out


def _run_chunk(task):
    cfg, value, mode, trial, chunk, size = task
    placement = cfg.placement_for(value)
    gains = _draw(cfg, placement, trial, chunk, size)
    if mode == "joint":
        return _joint_metrics(cfg, gains)
    return _erpa_metrics(cfg, gains, value)


def _ica_metrics(cfg: ExperimentConfig, gains: np.ndarray, power: float) -> dict:
    s2 = cfg.scenario.noise_power
    beta = ica_fractions(gains)
    p = np.full(len(gains), power)
    rates = user_rates(gains, beta, p, s2)
    return _score(cfg, gains, beta, p, rates, {})


# ------------------------------------------------------------- aggregation

def _mean(x: np.ndarray) -> float | None:
    return math.fsum(x.tolist()) / len(x) if len(x) else None


def _std(x: np.ndarray) -> float | None:
    if len(x) < 2:
        return None
    m = _mean(x)
    return math.sqrt(math.fsum(((x - m) ** 2).tolist()) / (len(x) - 1))


def _aggregate(value, strategy, per_trial: list, matched_power=None) -> PointResult:
    stats = {}
    for name in METRICS:
        allv = np.concatenate([t[name] for t in per_trial])
        trial_means = np.array([m for m in (_mean(t[name]) for t in per_trial) if m is not None])
        stats[name] = Stat(_mean(allv), _std(allv), _std(trial_means))
    beta = np.concatenate([t["beta"] for t in per_trial])
    rejected = {}
    for t in per_trial:
        for k, v in t["rejected"].items():
            rejected[k] = rejected.get(k, 0) + v
    if any("at_budget" in t for t in per_trial):
        rejected["at_budget_accepted"] = sum(t.get("at_budget", 0) for t in per_trial)
    bm = [_mean(beta[:, i]) for i in range(beta.shape[1])] if len(beta) else []
    bs = [_std(beta[:, i]) for i in range(beta.shape[1])] if len(beta) else []
    return PointResult(float(value), strategy, int(len(beta)), rejected, stats, bm, bs, matched_power)


def _merge(chunks: list) -> dict:
    out = {}
    for key in ("P", "Rs", "EE", "RE", "FJ", "FIT", "beta", "gains"):
        out[key] = np.concatenate([c[key] for c in chunks])
    rej = {}
    for c in chunks:
        for k, v in c["rejected"].items():
            rej[k] = rej.get(k, 0) + v
    out["rejected"] = rej
    if any("at_budget" in c for c in chunks):
        out["at_budget"] = sum(c.get("at_budget", 0) for c in chunks)
    return out


def _tasks(cfg: ExperimentConfig):
    """Work units in canonical order: (point index, mode, trial, chunk)."""
    kind = cfg.sweep.kind
    points = []
    if kind is SweepKind.RATE or kind is SweepKind.EE_CURVE:
        points = [(v, "erpa") for v in cfg.sweep.values]
    if kind is SweepKind.EE_CURVE:
        points.append((0.0, "joint"))
    if kind in (SweepKind.USERS, SweepKind.RADIUS):
        points = [(v, "joint") for v in cfg.sweep.values]
    sizes = chunk_sizes(cfg.samples)
    tasks = []
    for i, (v, mode) in enumerate(points):
        for k in range(cfg.trials):
            for j, n in enumerate(sizes):
                tasks.append((i, (cfg, v, mode, k, j, n)))
    return points, tasks


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentAggregate:
    """Evaluate every sweep point of ``cfg``; identical results for any ``workers``.

    Budget-infeasible, degenerate and bracket-boundary samples are excluded
    from the statistics and counted under ``PointResult.rejected``.
    """
    points, tasks = _tasks(cfg)
    payload = [t for _, t in tasks]
    if workers > 1 and len(payload) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_chunk, payload, chunksize=1))
    else:
        results = [_run_chunk(t) for t in payload]

    grouped: dict = {}
    for (i, task), res in zip(tasks, results):
        trial = task[3]
        grouped.setdefault(i, {}).setdefault(trial, []).append(res)

    out = []
    for i, (v, mode) in enumerate(points):
        per_trial = [_merge(grouped[i][k]) for k in range(cfg.trials)]
        if mode == "joint":
            out.append(_aggregate(v, "erpa-ee-opt" if cfg.sweep.kind is SweepKind.EE_CURVE else "erpa",
                                  per_trial))
            continue
        if cfg.strategy in (Strategy.ERPA, Strategy.BOTH):
            out.append(_aggregate(v, "erpa", per_trial))
        if cfg.strategy in (Strategy.ICA, Strategy.BOTH):
            p_all = np.concatenate([t["P"] for t in per_trial])
            if len(p_all):
                matched = _mean(p_all)
                ica_trials = [_ica_metrics(cfg, t["gains"], matched) for t in per_trial]
                for t, it in zip(per_trial, ica_trials):
                    it["rejected"] = dict(t["rejected"])
                out.append(_aggregate(v, "ica", ica_trials, matched))
    meta = {
        "fairness_aggregation": "per-realization indices averaged over accepted samples",
        "ica_power": "ERPA mean power over accepted samples at the same sweep point",
        "chunk_size": CHUNK_SIZE,
        "seeding": "SeedSequence(master_seed, spawn_key=(users, trial, chunk))",
    }
    return ExperimentAggregate(cfg, out, cfg.samples * cfg.trials, meta)


# -------------------------------------------------------------- trade-off

@dataclass
class TradeoffResult:
    best_users: int
    profile: dict  # M -> mean RE
    best: PointResult


def re_tradeoff(source, workers: int = 1) -> TradeoffResult:
    """User count maximizing mean resource efficiency ``xi0 * EE + R_s``.

    ``source`` is a users-sweep config (run here) or its aggregate.
    """
    agg = source if isinstance(source, ExperimentAggregate) else run_experiment(source, workers)
    if agg.config.sweep.kind is not SweepKind.USERS:
        raise ConfigError("trade-off needs a users sweep")
    profile = {}
    for p in agg.points:
        re = p.stats["RE"].mean
        if re is not None:
            profile[int(p.sweep_value)] = re
    if not profile:
        raise ConfigError("no sweep point produced accepted samples")
    best = max(profile, key=lambda m: (profile[m], -m))
    return TradeoffResult(best, profile, agg.point(best))


