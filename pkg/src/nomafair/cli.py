"""``nomafair`` command line: ``solve``, ``experiment`` and ``ee-curve``.

Exit codes: 0 success, 2 usage or invalid input, 3 budget exceeded or no
feasible optimum, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .channel import SCENARIOS, ChannelRealization, Fading, PlacementSpec, realize_channels
from .config import config_hash, dump_config, load_config, parse_list, parse_quantity
from .eeopt import dinkelbach_joint
from .erpa import min_power_closed_form, solve_erpa
from .errors import (BracketError, BudgetExceededError, ConfigError, ConvergenceError,
                     DegenerateChannelError, DomainError)
from .fairness import it_fairness
from .output import RunManifest, aggregate_csv, aggregate_json, csv_text, write_text
from .presets import PRESET_NAMES, build_preset
from .rates import Allocation, PowerModel, consumed_power, energy_efficiency
from .simulator import ExperimentConfig, Scenario, Strategy, Sweep, SweepKind, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4
OUTPUT_DIR_ENV = "NOMAFAIR_OUTPUT_DIR"
EE_CURVE_HEADER = ["rate", "sum_rate", "power", "amplified_power", "consumed_power", "ee", "is_optimum"]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _power(text: str) -> float:
    """Watts, with an optional unit: ``1e-6``, ``1 uW``, ``250mW``, ``none``."""
    if text.strip().lower() in ("none", "inf"):
        return math.inf
    return parse_quantity(text, "power", default_unit="W")


def _rate_grid(text: str) -> list[float]:
    text = text.strip()
    if not text:
        raise ConfigError("rate grid is empty")
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ConfigError("rate grid range must be start:stop:step with step > 0")
        n = int(math.floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1
        return [round(parts[0] + k * parts[2], 12) for k in range(n)]
    return parse_list(text, "rate", unit_optional=True)


def _add_channel_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gains", help="comma-separated channel power gains |h|^2")
    src.add_argument("--scenario", type=int, choices=sorted(SCENARIOS), help="fixed-distance scenario")
    src.add_argument("--distances", help="comma-separated user distances with unit, e.g. '340, 150 m'")
    p.add_argument("--alpha", type=float, default=2.0, help="path-loss exponent (default 2)")
    p.add_argument("--noise", default="1e-6", help="noise power, W unless a unit is given (default 1e-6)")
    p.add_argument("--fading", choices=[f.value for f in Fading], default="unit")
    p.add_argument("--seed", type=int, default=0, help="seed for Rayleigh draws")


def _add_power_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=float, default=1.4, help="amplifier inefficiency (default 1.4)")
    p.add_argument("--pc", default="0.25", help="circuit power per user, W (default 0.25)")
    p.add_argument("--budget", default="120", help="power budget, W, or 'none' (default 120)")


def _power_model(args) -> PowerModel:
    return PowerModel(args.rho, _power(args.pc), _power(args.budget))


def _placement(args) -> PlacementSpec:
    if args.scenario is not None:
        return PlacementSpec.scenario(args.scenario)
    return PlacementSpec.fixed(parse_list(args.distances, "length"))


def _channels(args) -> ChannelRealization:
    noise = _power(args.noise)
    if args.gains is not None:
        gains = [float(g) for g in args.gains.split(",") if g.strip()]
        return ChannelRealization.from_gains(gains, noise)
    rng = np.random.default_rng(args.seed)
    return realize_channels(_placement(args), args.alpha, noise, Fading(args.fading), rng)


def cmd_solve(args) -> int:
    ch = _channels(args)
    pm = _power_model(args)
    sol = solve_erpa(args.rate, ch, pm)
    alloc = Allocation.evaluate(sol.min_power, sol.fractions, ch)
    u_t = consumed_power(alloc, pm)
    doc = {
        "target_rate": sol.target_rate,
        "min_power": sol.min_power,
        "fractions": list(sol.fractions),
        "rates": list(sol.rates),
        "sum_rate": sol.sum_rate,
        "residual": sol.residual,
        "consumed_power": u_t,
        "energy_efficiency": energy_efficiency(sol.sum_rate, u_t),
        "gains": list(ch.gains),
        "noise_power": ch.noise_power,
    }
    if ch.user_count >= 2:
        fr = it_fairness(sol.rates, sol.fractions, sol.min_power, ch)
        doc["jain"] = fr.jain
        doc["it_fairness"] = fr.info_theoretic
    print(json.dumps(doc, indent=2, allow_nan=False))
    return EXIT_OK


def _check_writable(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")


def cmd_experiment(args) -> int:
    if (args.config is None) == (args.preset is None):
        raise ConfigError("give either a config file or --preset")
    if args.preset is not None:
        preset = build_preset(args.preset, args.samples, args.trials,
                              1 if args.seed is None else args.seed, args.alpha)
        configs, layout = preset.configs, preset.layout
        print(f"# preset {preset.name}: pinned values")
    else:
        if args.alpha is not None:
            raise ConfigError("--alpha only applies to presets")
        cfg = load_config(args.config)
        overrides = {k: v for k, v in (("samples", args.samples), ("trials", args.trials),
                                         ("master_seed", args.seed)) if v is not None}
        if overrides:
            cfg = replace(cfg, **overrides)
        configs, layout = [(Path(args.config).stem, cfg)], None
    for label, cfg in configs:
        print(f"# {label}")
        print(dump_config(cfg))

    out = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "nomafair-results")
    _check_writable(out)
    digest = config_hash(*(cfg for _, cfg in configs))
    manifest = RunManifest(digest, __version__, configs[0][1].master_seed, _now(),
                           pinned={label: dump_config(cfg) for label, cfg in configs})
    aggs = {}
    for label, cfg in configs:
        agg = run_experiment(cfg, workers=args.workers)
        aggs[label] = agg
        for name, text in ((f"{label}.csv", aggregate_csv(agg, digest)),
                           (f"{label}.json", aggregate_json(agg, digest, dump_config(cfg)))):
            write_text(out / name, text)
            manifest.outputs.append(name)
    if layout is not None:
        name, header, rows = layout(aggs)
        for row in rows:
            row[0] = digest
        write_text(out / name, csv_text(header, rows))
        manifest.outputs.append(name)
    manifest.finished = _now()
    write_text(out / "manifest.json", manifest.to_json())
    print(f"wrote {len(manifest.outputs)} files and manifest.json to {out} (config hash {digest[:12]})")
    return EXIT_OK


def _ee_curve_unit(ch: ChannelRealization, pm: PowerModel, grid, args):
    M = ch.user_count
    rows, skipped = [], []
    for r in grid:
        p = min_power_closed_form(r, ch)
        if p > pm.power_budget:
            skipped.append(r)
            continue
        amp = pm.amplifier_inefficiency * p
        u_t = amp + M * pm.circuit_power_per_user
        rows.append([r, M * r, p, amp, u_t, M * r / u_t, 0])
    sol = dinkelbach_joint(ch, pm, rate_bracket=(args.rate_min, args.rate_max))
    amp = pm.amplifier_inefficiency * sol.optimal_power
    rows.append([sol.optimal_rate, sol.sum_rate, sol.optimal_power, amp,
                 amp + M * pm.circuit_power_per_user, sol.q_star, 1])
    return rows, skipped


def _ee_curve_rayleigh(args, pm: PowerModel, grid):
    if args.gains is not None:
        raise ConfigError("Rayleigh averaging needs --scenario or --distances, not --gains")
    cfg = ExperimentConfig(Scenario(_placement(args), args.alpha, _power(args.noise), Fading.RAYLEIGH),
                           Sweep(SweepKind.EE_CURVE, tuple(grid)), pm, Strategy.ERPA,
                           args.samples, args.trials, args.seed, rate_bracket=(args.rate_min, args.rate_max))
    agg = run_experiment(cfg, workers=args.workers)
    M = cfg.scenario.placement.user_count
    rows, skipped = [], []
    for p in agg.points:
        s = p.stats
        if s["P"].mean is None:
            skipped.append(p.sweep_value)
            continue
        opt = p.strategy == "erpa-ee-opt"
        amp = pm.amplifier_inefficiency * s["P"].mean
        rate = s["Rs"].mean / M if opt else p.sweep_value
        rows.append([rate, s["Rs"].mean, s["P"].mean, amp, amp + M * pm.circuit_power_per_user,
                     s["EE"].mean, 1 if opt else 0])
    if not rows or rows[-1][-1] != 1:
        raise BudgetExceededError(float("nan"), pm.power_budget, "no sample admits a feasible EE optimum")
    return rows, skipped


def cmd_ee_curve(args) -> int:
    grid = _rate_grid(args.rates)
    if any(not (r > 0 and math.isfinite(r)) for r in grid):
        raise ConfigError("rates must be finite and > 0")
    pm = _power_model(args)
    if args.fading == Fading.RAYLEIGH.value:
        rows, skipped = _ee_curve_rayleigh(args, pm, grid)
    else:
        rows, skipped = _ee_curve_unit(_channels(args), pm, grid, args)
    if skipped:
        print(f"skipped {len(skipped)} grid rates over the power budget", file=sys.stderr)
    text = csv_text(EE_CURVE_HEADER, rows)
    opt = rows[-1]
    print(f"optimum: sum rate {opt[1]:.4g} bit/s/Hz, EE {opt[5]:.4g} bit/J/Hz, "
          f"transmit power {opt[2]:.4g} W, amplified power {opt[3]:.4g} W, consumed {opt[4]:.4g} W",
          file=sys.stderr)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        write_text(args.output, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nomafair", description="Equal-rate NOMA power allocation tools")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimum-power equal-rate allocation for one channel")
    _add_channel_args(p)
    p.add_argument("--rate", type=float, required=True, help="common per-user rate, bit/s/Hz")
    _add_power_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment from a config file or preset")
    p.add_argument("config", nargs="?", help="INI experiment config")
    p.add_argument("--preset", choices=PRESET_NAMES)
    p.add_argument("-o", "--output-dir", help=f"output directory (default ${OUTPUT_DIR_ENV} or ./nomafair-results)")
    p.add_argument("--samples", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float, help="path-loss exponent for presets that sweep it")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("ee-curve", help="EE and power along the equal-rate curve with the EE optimum")
    _add_channel_args(p)
    p.add_argument("--rates", default="0.1:3:0.1", help="per-user rate grid: list or start:stop:step")
    _add_power_args(p)
    p.add_argument("--rate-min", type=float, default=1e-3)
    p.add_argument("--rate-max", type=float, default=12.0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_ee_curve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"nomafair: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (BracketError, ConvergenceError) as exc:
        print(f"nomafair: no feasible optimum: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, DomainError, DegenerateChannelError, ValueError) as exc:
        print(f"nomafair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nomafair: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
