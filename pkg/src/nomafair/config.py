"""Experiment config files: INI sections with explicit physical units.

Example::

    [scenario]
    placement = fixed
    distances = 0.34, 0.29, 0.22, 0.15 km
    alpha = 2
    noise = 1 uW
    fading = unit

    [power]
    amplifier_inefficiency = 1.4
    circuit_power = 250 mW
    budget = 120 W

    [sweep]
    kind = rate
    values = 0.5, 1, 1.5, 2 bit/s/Hz

    [run]
    strategy = both
    samples = 1
    trials = 1
    seed = 7
    xi0 = 1.8 W

In a list, items without a unit take the unit of the last item. Lengths and
powers must carry a unit. :func:`dump_config` writes the canonical form,
which parses back to an equal config; its SHA-256 is the config hash.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import re

from .channel import Fading, PlacementSpec, SCENARIOS
from .errors import ConfigError, NomaError
from .rates import PowerModel
from .simulator import ExperimentConfig, Scenario, Strategy, Sweep, SweepKind

UNITS = {
    "length": {"m": 1.0, "km": 1e3},
    "power": {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "µW": 1e-6, "nW": 1e-9},
    "rate": {"bit/s/Hz": 1.0, "bps/Hz": 1.0},
}
CANONICAL_UNIT = {"length": "m", "power": "W", "rate": "bit/s/Hz"}

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*?)?\s*$")

SCHEMA = {
    "scenario": {"placement", "distances", "scenario", "radius", "users", "alpha", "noise", "fading"},
    "power": {"amplifier_inefficiency", "circuit_power", "budget"},
    "sweep": {"kind", "values"},
    "run": {"strategy", "samples", "trials", "seed", "xi0", "rate_bracket", "eps"},
}


def parse_quantity(text: str, kind: str | None = None, default_unit: str | None = None,
                   line: int | None = None) -> float:
    """``"250 mW"`` -> 0.25. ``kind`` selects the unit table; None means unitless."""
    m = _QTY.match(text)
    if not m:
        raise ConfigError(f"cannot read a number from {text!r}", line)
    value, unit = float(m.group(1)), m.group(2) or default_unit
    if kind is None:
        if unit:
            raise ConfigError(f"{text!r} takes no unit", line)
        return value
    if unit is None:
        raise ConfigError(f"{text!r} needs a unit ({', '.join(UNITS[kind])})", line)
    try:
        return value * UNITS[kind][unit]
    except KeyError:
        raise ConfigError(f"unknown {kind} unit {unit!r} in {text!r}", line) from None


def parse_list(text: str, kind: str | None = None, line: int | None = None,
               unit_optional: bool = False) -> list[float]:
    items = [s for s in (p.strip() for p in text.split(",")) if s]
    if not items:
        raise ConfigError("empty list", line)
    tail = _QTY.match(items[-1])
    inherited = tail.group(2) if tail else None
    if kind is not None and inherited is None and unit_optional:
        inherited = CANONICAL_UNIT[kind]
    return [parse_quantity(s, kind, inherited, line) for s in items]


def _line_index(text: str) -> dict:
    """Map ``section`` and ``(section, key)`` to 1-based line numbers."""
    index, section = {}, None
    for n, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            index.setdefault(section, n)
        elif section is not None:
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            index.setdefault((section, key), n)
    return index


class _Reader:
    def __init__(self, parser, lines):
        self.p = parser
        self.lines = lines

    def line(self, section, key=None):
        return self.lines.get((section, key)) if key else self.lines.get(section)

    def has(self, section, key):
        return self.p.has_option(section, key)

    def raw(self, section, key, default=None):
        if not self.p.has_option(section, key):
            if default is not None:
                return default
            raise ConfigError(f"missing [{section}] {key}", self.line(section))
        return self.p.get(section, key).strip()

    def qty(self, section, key, kind=None, default=None):
        raw = self.raw(section, key, default)
        if raw.lower() in ("none", "inf", "unlimited") and kind == "power":
            return math.inf
        return parse_quantity(raw, kind, line=self.line(section, key))

    def int(self, section, key, default=None):
        v = self.qty(section, key, None, default)
        if v != int(v):
            raise ConfigError(f"[{section}] {key} must be an integer", self.line(section, key))
        return int(v)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config; errors carry the offending line number."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str.lower
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], line) from None
    lines = _line_index(text)
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", lines.get(section))
        for key in parser.options(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lines.get((section, key)))
    for section in ("scenario", "sweep"):
        if not parser.has_section(section):
            raise ConfigError(f"missing section [{section}]")
    r = _Reader(parser, lines)
    try:
        return _build(r)
    except ConfigError:
        raise
    except (NomaError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _build(r: _Reader) -> ExperimentConfig:
    placement_kind = r.raw("scenario", "placement", "fixed").lower()
    if placement_kind == "fixed":
        if r.has("scenario", "scenario"):
            number = r.int("scenario", "scenario")
            if number not in SCENARIOS:
                raise ConfigError(f"unknown scenario {number}", r.line("scenario", "scenario"))
            placement = PlacementSpec.scenario(number)
        else:
            placement = PlacementSpec.fixed(
                parse_list(r.raw("scenario", "distances"), "length", r.line("scenario", "distances")))
    elif placement_kind == "disc":
        placement = PlacementSpec.disc(r.qty("scenario", "radius", "length"), r.int("scenario", "users", "2"))
    else:
        raise ConfigError(f"placement must be 'fixed' or 'disc', not {placement_kind!r}",
                          r.line("scenario", "placement"))
    fading = r.raw("scenario", "fading", "rayleigh").lower()
    if fading not in {f.value for f in Fading}:
        raise ConfigError(f"fading must be unit or rayleigh, not {fading!r}", r.line("scenario", "fading"))
    scenario = Scenario(placement, r.qty("scenario", "alpha"), r.qty("scenario", "noise", "power"),
                        Fading(fading))

    pm = PowerModel(
        r.qty("power", "amplifier_inefficiency", None, "1.4") if r.p.has_section("power") else 1.4,
        r.qty("power", "circuit_power", "power", "250 mW") if r.p.has_section("power") else 0.25,
        r.qty("power", "budget", "power", "120 W") if r.p.has_section("power") else 120.0,
    )

    kind_raw = r.raw("sweep", "kind").lower()
    try:
        kind = SweepKind(kind_raw)
    except ValueError:
        raise ConfigError(f"unknown sweep kind {kind_raw!r}", r.line("sweep", "kind")) from None
    unit = {SweepKind.RATE: "rate", SweepKind.EE_CURVE: "rate", SweepKind.RADIUS: "length",
            SweepKind.USERS: None}[kind]
    values = parse_list(r.raw("sweep", "values"), unit, r.line("sweep", "values"),
                        unit_optional=(unit == "rate"))
    try:
        sweep = Sweep(kind, tuple(values))
    except ConfigError as exc:
        raise ConfigError(str(exc), r.line("sweep", "values")) from None

    has_run = r.p.has_section("run")

    def run(key, kind=None, default=None):
        return r.qty("run", key, kind, default) if has_run else parse_quantity(default, kind)

    strategy = r.raw("run", "strategy", "erpa").lower() if has_run else "erpa"
    if strategy not in {s.value for s in Strategy}:
        raise ConfigError(f"unknown strategy {strategy!r}", r.line("run", "strategy"))
    bracket = (parse_list(r.raw("run", "rate_bracket", "0.001, 12"), "rate", r.line("run", "rate_bracket"),
                          unit_optional=True) if has_run else [1e-3, 12.0])
    if len(bracket) != 2:
        raise ConfigError("rate_bracket needs two values", r.line("run", "rate_bracket"))
    ints = {}
    for key, default in (("samples", "10000"), ("trials", "5"), ("seed", "0")):
        ints[key] = r.int("run", key, default) if has_run else int(default)
    try:
        return ExperimentConfig(
            scenario=scenario, sweep=sweep, power_model=pm, strategy=Strategy(strategy),
            samples=ints["samples"], trials=ints["trials"], master_seed=ints["seed"],
            xi0=run("xi0", "power", "1.8 W"), rate_bracket=(bracket[0], bracket[1]),
            eps=run("eps", None, "1e-8"),
        )
    except ConfigError as exc:
        raise ConfigError(str(exc), r.line("run")) from None


def _fmt(x: float) -> str:
    return repr(float(x))


def _q(x: float, unit: str) -> str:
    return "none" if math.isinf(x) else f"{_fmt(x)} {unit}"


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical text form: fixed key order, SI units on every quantity."""
    sc = cfg.scenario
    pl = sc.placement
    out = ["[scenario]"]
    if pl.is_disc:
        out += ["placement = disc", f"radius = {_q(pl.radius, 'm')}", f"users = {pl.user_count}"]
    else:
        out += ["placement = fixed", "distances = " + ", ".join(_q(d, "m") for d in pl.distances)]
    out += [f"alpha = {_fmt(sc.alpha)}", f"noise = {_q(sc.noise_power, 'W')}", f"fading = {sc.fading.value}", ""]
    pm = cfg.power_model
    out += ["[power]", f"amplifier_inefficiency = {_fmt(pm.amplifier_inefficiency)}",
            f"circuit_power = {_q(pm.circuit_power_per_user, 'W')}", f"budget = {_q(pm.power_budget, 'W')}", ""]
    kind = cfg.sweep.kind
    if kind is SweepKind.USERS:
        vals = ", ".join(str(int(v)) for v in cfg.sweep.values)
    elif kind is SweepKind.RADIUS:
        vals = ", ".join(_q(v, "m") for v in cfg.sweep.values)
    else:
        vals = ", ".join(_fmt(v) for v in cfg.sweep.values) + " bit/s/Hz"
    out += ["[sweep]", f"kind = {kind.value}", f"values = {vals}", ""]
    lo, hi = cfg.rate_bracket
    out += ["[run]", f"strategy = {cfg.strategy.value}", f"samples = {cfg.samples}", f"trials = {cfg.trials}",
            f"seed = {cfg.master_seed}", f"xi0 = {_q(cfg.xi0, 'W')}",
            f"rate_bracket = {_fmt(lo)}, {_fmt(hi)} bit/s/Hz", f"eps = {_fmt(cfg.eps)}", ""]
    return "\n".join(out)


def config_hash(*configs: ExperimentConfig) -> str:
    h = hashlib.sha256()
    for cfg in configs:
        h.update(dump_config(cfg).encode("utf-8"))
    return h.hexdigest()


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
