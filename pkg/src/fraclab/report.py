"""Deterministic report assembly and serialization.

Reports are byte-identical across runs with identical inputs and seeds:
records are ordered by sample index, floats are serialized by repr, and the
wall time measured for a run is kept in memory only (opt-in for emission)
so default output stays reproducible.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import IoError


def sanitize(obj):
    """Recursively convert numpy scalars/arrays and frames for JSON output."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    for attr in ("directions", "basis"):
        if hasattr(obj, attr):
            return {attr: sanitize(getattr(obj, attr))}
    return repr(obj)


@dataclass
class Report:
    command: str
    args: dict
    seed: int
    records: list
    summary: dict
    wall_time: float = 0.0
    exit_code: int = 0
    notes: list = field(default_factory=list)

    def to_payload(self, include_timing: bool = False) -> dict:
        payload = {
            "command": self.command,
            "args": sanitize(self.args),
            "seed": self.seed,
            "records": sanitize(self.records),
            "summary": sanitize(self.summary),
            "notes": sanitize(self.notes),
        }
        if include_timing:
            payload["wall_time"] = self.wall_time
        return payload


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def to_json(report: Report, include_timing: bool = False) -> str:
    return json.dumps(report.to_payload(include_timing), sort_keys=True, indent=2) + "\n"


CSV_COLUMNS = ("index", "point", "value", "lo", "hi", "verdict", "witness")


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for rec in report.records:
        rec = sanitize(rec)
        point = rec.get("point")
        witness = rec.get("witness")
        row = [
            _fmt(rec.get("index")),
            "" if point is None else " ".join(_fmt(float(c)) for c in point),
            _fmt(rec.get("value")),
            _fmt(rec.get("lo")),
            _fmt(rec.get("hi")),
            _fmt(rec.get("verdict")),
            "" if witness is None else json.dumps(witness, sort_keys=True),
        ]
        buf.write(",".join('"' + c.replace('"', '""') + '"' for c in row) + "\n")
    return buf.getvalue()


def to_text(report: Report) -> str:
    lines = [f"# {report.command}"]
    for key in sorted(report.args):
        lines.append(f"  {key} = {_fmt(report.args[key])}")
    lines.append(f"  seed = {report.seed}")
    lines.append("")
    for rec in report.records:
        rec = sanitize(rec)
        point = rec.get("point")
        pt = "" if point is None else "(" + ", ".join(_fmt(float(c)) for c in point) + ")"
        msg = f"[{rec.get('index')}] {pt} {rec.get('verdict', '')}"
        if rec.get("value") is not None:
            msg += f" value={_fmt(rec['value'])}"
            if rec.get("lo") is not None:
                msg += f" bracket=[{_fmt(rec['lo'])}, {_fmt(rec['hi'])}]"
        lines.append(msg)
    lines.append("")
    for key in sorted(report.summary):
        lines.append(f"{key}: {_fmt(sanitize(report.summary[key]))}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise IoError(f"unknown report format {fmt!r}")


def emit_report(report: Report, fmt: str = "text", path=None) -> str:
    """Serialize deterministically; write to path when given, return the text."""
    text = render(report, fmt)
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as e:
            raise IoError(f"cannot write report to {path}: {e}") from e
    return text
