"""Named reproduction presets with every constant pinned.

``fig-rate-power``
    Scenarios 1-3, alpha 2, unit fading, noise 1 uW, R in {0.5, ..., 2.5},
    ERPA and ICA at matched power.
``table3``
    F_IT grid: Scenarios 1-3 at alpha 2 and Scenario 1 at alpha 3, Rayleigh,
    noise 0.1 uW, R in {1, 1.5, 2, 2.5, 3}, no power cap.
``table4``
    Best user count by resource efficiency (xi0 = 1.8) for disc radii
    {50, 100, 200, 300, 400} m, M = 2..12, Rayleigh, noise 0.1 uW.
``ee-curve``
    EE and power along the equal-rate curve plus the joint EE optimum for
    Scenarios 1-3, alpha 2, Rayleigh, noise 1 uW, rho 1.4, Pc 250 mW, 120 W cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .channel import Fading, PlacementSpec
from .errors import ConfigError
from .rates import PowerModel
from .simulator import (ExperimentConfig, Scenario, Strategy, Sweep, SweepKind,
                        re_tradeoff)

REFERENCE_POWER = PowerModel(1.4, 0.25, 120.0)
TABLE3_RATES = (1.0, 1.5, 2.0, 2.5, 3.0)
TABLE4_RADII = (50.0, 100.0, 200.0, 300.0, 400.0)
TABLE4_ALPHAS = (2.0, 3.0, 4.5)
TABLE4_USERS = tuple(float(m) for m in range(2, 13))
FIG_RATES = (0.5, 1.0, 1.5, 2.0, 2.5)
EE_CURVE_RATES = tuple(round(0.1 * k, 10) for k in range(1, 31))


@dataclass
class Preset:
    name: str
    configs: list  # (label, ExperimentConfig)
    layout: Callable | None = None  # dict label -> aggregate => (filename, header, rows)


def _alpha_tag(alpha: float) -> str:
    return f"{alpha:g}".replace(".", "p")


def _fig_rate_power(samples, trials, seed, alpha):
    a = 2.0 if alpha is None else alpha
    return [
        (f"fig_rate_power_s{n}_a{_alpha_tag(a)}", ExperimentConfig(
            Scenario(PlacementSpec.scenario(n), a, 1e-6, Fading.UNIT),
            Sweep(SweepKind.RATE, FIG_RATES), REFERENCE_POWER, Strategy.BOTH,
            samples or 1, trials or 1, seed))
        for n in (1, 2, 3)
    ], None


def _table3(samples, trials, seed, alpha):
    uncapped = replace(REFERENCE_POWER, power_budget=math.inf)
    cases = [(1, 2.0), (2, 2.0), (3, 2.0), (1, 3.0)] if alpha is None else [(n, alpha) for n in (1, 2, 3)]
    configs = [
        (f"table3_s{n}_a{_alpha_tag(a)}", ExperimentConfig(
            Scenario(PlacementSpec.scenario(n), a, 1e-7, Fading.RAYLEIGH),
            Sweep(SweepKind.RATE, TABLE3_RATES), uncapped, Strategy.ERPA,
            samples or 10_000, trials or 5, seed))
        for n, a in cases
    ]
    labels = [label for label, _ in configs]

    def layout(aggs):
        header = ["config_hash", "rate"] + labels
        rows = [[None, r] + [aggs[label].point(r).stats["FIT"].mean for label in labels] for r in TABLE3_RATES]
        return "table3.csv", header, rows

    return configs, layout


def _table4(samples, trials, seed, alpha):
    alphas = TABLE4_ALPHAS if alpha is None else (alpha,)
    configs = [
        (f"table4_a{_alpha_tag(a)}_r{int(rd)}", ExperimentConfig(
            Scenario(PlacementSpec.disc(rd, 2), a, 1e-7, Fading.RAYLEIGH),
            Sweep(SweepKind.USERS, TABLE4_USERS), REFERENCE_POWER, Strategy.ERPA,
            samples or 10_000, trials or 5, seed, xi0=1.8))
        for a in alphas for rd in TABLE4_RADII
    ]

    def layout(aggs):
        header = ["config_hash", "alpha", "radius_m", "best_users", "EE_mean", "Rs_mean", "P_mean", "RE_mean"]
        rows = []
        for label, cfg in configs:
            best = re_tradeoff(aggs[label])
            s = best.best.stats
            rows.append([None, cfg.scenario.alpha, cfg.scenario.placement.radius, best.best_users,
                         s["EE"].mean, s["Rs"].mean, s["P"].mean, s["RE"].mean])
        return "table4.csv", header, rows

    return configs, layout


def _ee_curve(samples, trials, seed, alpha):
    a = 2.0 if alpha is None else alpha
    configs = [
        (f"ee_curve_s{n}_a{_alpha_tag(a)}", ExperimentConfig(
            Scenario(PlacementSpec.scenario(n), a, 1e-6, Fading.RAYLEIGH),
            Sweep(SweepKind.EE_CURVE, EE_CURVE_RATES), REFERENCE_POWER, Strategy.ERPA,
            samples or 10_000, trials or 5, seed))
        for n in (1, 2, 3)
    ]

    def layout(aggs):
        header = ["config_hash", "scenario", "Rs_mean", "EE_mean", "P_mean", "rho_P_mean", "consumed_mean"]
        rows = []
        for n, (label, cfg) in enumerate(configs, start=1):
            s = aggs[label].point(0.0, "erpa-ee-opt").stats
            pm = cfg.power_model
            m = cfg.scenario.placement.user_count
            p = s["P"].mean
            rho_p = None if p is None else pm.amplifier_inefficiency * p
            consumed = None if p is None else rho_p + m * pm.circuit_power_per_user
            rows.append([None, n, s["Rs"].mean, s["EE"].mean, p, rho_p, consumed])
        return "ee_optimum.csv", header, rows

    return configs, layout


_BUILDERS = {
    "fig-rate-power": _fig_rate_power,
    "table3": _table3,
    "table4": _table4,
    "ee-curve": _ee_curve,
}
PRESET_NAMES = tuple(_BUILDERS)


def build_preset(name: str, samples: int | None = None, trials: int | None = None,
                 seed: int = 1, alpha: float | None = None) -> Preset:
    """Configs for a named preset; ``samples``/``trials`` override the pinned counts."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
    configs, layout = builder(samples, trials, seed, alpha)
    return Preset(name, configs, layout)

