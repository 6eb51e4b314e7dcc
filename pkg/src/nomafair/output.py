"""CSV and JSON emission for experiment aggregates and the run manifest.

Per-sweep CSV columns (stable order)::

    config_hash, sweep, value, strategy, samples_accepted, samples_rejected,
    P_mean, P_std, P_trial_std, Rs_mean, ..., FIT_trial_std

Undefined statistics (no accepted samples, or a single sample or trial for a
deviation) are written as empty fields, so every emitted number is finite.
Floats use ``repr`` so a rerun reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

from .simulator import METRICS, ExperimentAggregate

STAT_FIELDS = ("mean", "std", "trial_std")
CSV_HEADER = (["config_hash", "sweep", "value", "strategy", "samples_accepted", "samples_rejected"]
              + [f"{m}_{s}" for m in METRICS for s in STAT_FIELDS])


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    return repr(x) if math.isfinite(x) else ""


def finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def aggregate_rows(agg: ExperimentAggregate, config_hash: str):
    kind = agg.config.sweep.kind.value
    for p in agg.points:
        row = [config_hash, kind, p.sweep_value, p.strategy, p.accepted, sum(
            v for k, v in p.rejected.items() if k != "at_budget_accepted")]
        for m in METRICS:
            st = p.stats[m]
            row += [st.mean, st.std, st.trial_std]
        yield row


def aggregate_csv(agg: ExperimentAggregate, config_hash: str) -> str:
    return csv_text(CSV_HEADER, aggregate_rows(agg, config_hash))


def aggregate_json(agg: ExperimentAggregate, config_hash: str, config_text: str) -> str:
    points = []
    for p in agg.points:
        points.append({
            "value": p.sweep_value,
            "strategy": p.strategy,
            "samples_accepted": p.accepted,
            "rejected": dict(sorted(p.rejected.items())),
            "stats": {m: {s: finite_or_none(getattr(p.stats[m], s)) for s in STAT_FIELDS} for m in METRICS},
            "beta_mean": [finite_or_none(b) for b in p.beta_mean],
            "beta_std": [finite_or_none(b) for b in p.beta_std],
            "matched_power": finite_or_none(p.matched_power),
        })
    doc = {
        "config_hash": config_hash,
        "config": config_text,
        "sweep": agg.config.sweep.kind.value,
        "total_samples": agg.total_samples,
        "metadata": agg.metadata,
        "points": points,
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    master_seed: int
    started: str
    finished: str = ""
    outputs: list = field(default_factory=list)
    pinned: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "master_seed": self.master_seed,
            "started": self.started,
            "finished": self.finished,
            "outputs": self.outputs,
            "pinned": self.pinned,
        }
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text(path, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
