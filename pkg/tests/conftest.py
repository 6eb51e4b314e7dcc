import numpy as np
import pytest

from nomafair.channel import ChannelRealization, Fading, PlacementSpec, realize_channels


@pytest.fixture
def toy():
    """Two users, gains 0.5 and 1, unit noise: P* = 4 at R = 1."""
    return ChannelRealization((0.5, 1.0), 1.0)


@pytest.fixture
def scenario1():
    return realize_channels(PlacementSpec.scenario(1), 2.0, 1e-6, Fading.UNIT)


def random_channel(rng, users=None, noise=None):
    m = int(rng.integers(2, 13)) if users is None else users
    gains = np.exp(rng.uniform(np.log(1e-6), np.log(1e-2), m))
    return ChannelRealization.from_gains(gains, 1e-7 if noise is None else noise)


# ------------------------------------------------ acceptance summary lines

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture
def detail(request):
    """Attach a measured-value note to the acceptance summary line."""

    def note(text):
        request.node.user_properties.append(("detail", text))

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    entry = _CRITERIA.setdefault(mark.args[0], {"ok": True, "notes": []})
    entry["ok"] &= rep.passed
    entry["notes"] += [v for k, v in item.user_properties if k == "detail"]
    if rep.failed:
        entry["notes"].append(f"{item.name} failed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        notes = "; ".join(dict.fromkeys(e["notes"]))
        terminalreporter.write_line(f"AC{n} {'PASS' if e['ok'] else 'FAIL'}" + (f"  {notes}" if notes else ""))
