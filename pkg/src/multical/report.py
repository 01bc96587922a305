"""JSON / CSV serialisation of results.

Report schema (all commands)::

    {
      "command": "<subcommand>",
      "config": {<fully resolved RunConfig, defaults included>},
      "inputs": {...},          # command specific, e.g. dataset path
      "results": {...}          # command specific, see below
    }

``audit`` results: ``{"verdict": bool, "predictors": [<audit report>, ...]}``
where each audit report is ``{"predictor", "verdict", "parameters",
"entries": [{"group", "interval", "interval_lo", "interval_hi",
"interval_closed_hi", "p_joint", "p_group", "p_cond", "mu_y", "mu_h",
"n_hat", "source", "calibration_error", "interesting", "violation",
"reason"}]}``.  Undefined quantities are ``null``; an infinite deviation is
the string ``"inf"``.

Floats are written with Python's shortest round-trip repr, so reloading a
report reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction

from .metrics import AuditEntry, AuditReport

ENTRY_FIELDS = [
    "predictor", "group", "interval", "interval_lo", "interval_hi", "interval_closed_hi",
    "p_joint", "p_group", "p_cond", "mu_y", "mu_h", "n_hat", "source",
    "calibration_error", "interesting", "violation", "reason",
]


def jsonable(obj):
    """Recursively convert results into JSON-safe builtins."""
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return None
        return obj
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    if isinstance(obj, AuditReport):
        return audit_to_dict(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):
        return jsonable(obj._asdict())
    if dataclasses.is_dataclass(obj):
        return jsonable({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return jsonable(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def entry_to_dict(predictor: str, e: AuditEntry) -> dict:
    iv = e.category.interval
    s = e.stats
    return {
        "predictor": predictor,
        "group": e.category.group,
        "interval": str(iv),
        "interval_lo": float(iv.lo),
        "interval_hi": float(iv.hi),
        "interval_closed_hi": iv.closed_hi,
        "p_joint": s.p_joint,
        "p_group": s.p_group,
        "p_cond": s.p_cond,
        "mu_y": s.mu_y,
        "mu_h": s.mu_h,
        "n_hat": s.n_hat,
        "source": s.source,
        "calibration_error": e.calibration_error,
        "interesting": e.interesting,
        "violation": e.violation,
        "reason": e.reason,
    }


def audit_to_dict(r: AuditReport) -> dict:
    return {
        "predictor": r.predictor,
        "verdict": r.verdict,
        "parameters": jsonable(r.parameters),
        "entries": [jsonable(entry_to_dict(r.predictor, e)) for e in r.entries],
    }


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, allow_nan=False) + "\n"


def audit_csv(reports: list[AuditReport]) -> str:
    """One CSV row per (predictor, category)."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=ENTRY_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        for e in r.entries:
            row = entry_to_dict(r.predictor, e)
            w.writerow({k: "" if v is None else (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
