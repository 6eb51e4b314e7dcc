import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nomafair.channel import Fading, PlacementSpec
from nomafair.config import config_hash, dump_config, load_config, parse_config, parse_list, parse_quantity
from nomafair.errors import ConfigError
from nomafair.presets import PRESET_NAMES, build_preset
from nomafair.rates import PowerModel
from nomafair.simulator import ExperimentConfig, Scenario, Strategy, Sweep, SweepKind

EXAMPLE = """\
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
"""


def test_parse_example():
    cfg = parse_config(EXAMPLE)
    assert cfg.scenario.placement == PlacementSpec.scenario(1)
    assert cfg.scenario.noise_power == pytest.approx(1e-6)
    assert cfg.scenario.fading is Fading.UNIT
    assert cfg.power_model == PowerModel(1.4, 0.25, 120.0)
    assert cfg.sweep == Sweep(SweepKind.RATE, (0.5, 1.0, 1.5, 2.0))
    assert cfg.strategy is Strategy.BOTH
    assert (cfg.samples, cfg.trials, cfg.master_seed, cfg.xi0) == (1, 1, 7, 1.8)


@pytest.mark.parametrize("text, kind, value", [
    ("250 mW", "power", 0.25), ("0.1uW", "power", 1e-7), ("1 µW", "power", 1e-6), ("3 nW", "power", 3e-9),
    ("1.2 km", "length", 1200.0), ("50 m", "length", 50.0), ("2 bit/s/Hz", "rate", 2.0), ("1e-3", None, 1e-3),
])
def test_units(text, kind, value):
    assert parse_quantity(text, kind) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text, kind", [("50", "length"), ("5 furlong", "length"), ("abc", None), ("2 W", None)])
def test_unit_errors(text, kind):
    with pytest.raises(ConfigError):
        parse_quantity(text, kind)


def test_list_unit_inheritance():
    assert parse_list("1 km, 200, 300 m", "length") == [1000.0, 200.0, 300.0]
    assert parse_list("1, 2", "rate", unit_optional=True) == [1.0, 2.0]


def _err_line(text):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    return info.value.line, str(info.value)


def test_missing_unit_reports_line():
    line, msg = _err_line(EXAMPLE.replace("noise = 1 uW", "noise = 1"))
    assert line == 5 and msg.startswith("line 5:")


def test_unknown_key_reports_line():
    line, _ = _err_line(EXAMPLE.replace("budget = 120 W", "budgett = 120 W"))
    assert line == 11


def test_bad_sweep_values_report_line():
    line, _ = _err_line(EXAMPLE.replace("values = 0.5, 1, 1.5, 2 bit/s/Hz", "values = 0.5, -1"))
    assert line == 15


def test_duplicate_key_reports_line():
    line, _ = _err_line(EXAMPLE.replace("alpha = 2\n", "alpha = 2\nalpha = 3\n"))
    assert line == 5


def test_missing_section_and_bad_kind():
    with pytest.raises(ConfigError):
        parse_config("[scenario]\nalpha = 2\nnoise = 1 W\ndistances = 1 m, 2 m\n")
    line, _ = _err_line(EXAMPLE.replace("kind = rate", "kind = voltage"))
    assert line == 14


def test_strategy_mismatch_is_config_error():
    text = EXAMPLE.replace("kind = rate", "kind = ee-curve")
    with pytest.raises(ConfigError):
        parse_config(text)


def test_uncapped_budget():
    cfg = parse_config(EXAMPLE.replace("budget = 120 W", "budget = none"))
    assert math.isinf(cfg.power_model.power_budget)
    assert "budget = none" in dump_config(cfg)


def test_round_trip_example():
    cfg = parse_config(EXAMPLE)
    text = dump_config(cfg)
    assert parse_config(text) == cfg
    assert dump_config(parse_config(text)) == text


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_round_trip(name):
    for _, cfg in build_preset(name).configs:
        assert parse_config(dump_config(cfg)) == cfg


@settings(max_examples=50)
@given(radius=st.floats(1.0, 5e3), users=st.lists(st.integers(2, 12), min_size=1, max_size=5, unique=True),
       alpha=st.floats(2.0, 6.0), noise=st.floats(1e-12, 1.0), seed=st.integers(0, 2**31),
       pc=st.floats(0.0, 2.0), xi0=st.floats(0.0, 10.0))
def test_round_trip_property(radius, users, alpha, noise, seed, pc, xi0):
    cfg = ExperimentConfig(Scenario(PlacementSpec.disc(radius, 2), alpha, noise, Fading.RAYLEIGH),
                           Sweep(SweepKind.USERS, tuple(users)), PowerModel(1.4, pc, 120.0), Strategy.ERPA,
                           100, 3, seed, xi0=xi0)
    assert parse_config(dump_config(cfg)) == cfg


def test_config_hash_stable(tmp_path):
    cfg = parse_config(EXAMPLE)
    path = tmp_path / "a.ini"
    path.write_text(dump_config(cfg))
    assert config_hash(load_config(path)) == config_hash(cfg)
    assert len(config_hash(cfg)) == 64
    other = parse_config(EXAMPLE.replace("seed = 7", "seed = 8"))
    assert config_hash(other) != config_hash(cfg)


def test_preset_unknown():
    with pytest.raises(ConfigError):
        build_preset("fig-99")


def test_preset_pins():
    t3 = build_preset("table3")
    labels = [label for label, _ in t3.configs]
    assert labels == ["table3_s1_a2", "table3_s2_a2", "table3_s3_a2", "table3_s1_a3"]
    for _, cfg in t3.configs:
        assert cfg.scenario.noise_power == 1e-7 and math.isinf(cfg.power_model.power_budget)
        assert (cfg.samples, cfg.trials) == (10_000, 5)
    t4 = build_preset("table4", alpha=2.0)
    assert len(t4.configs) == 5
    assert {cfg.xi0 for _, cfg in t4.configs} == {1.8}
    assert len(build_preset("table4").configs) == 15
