"""Check records, deterministic JSON reports, CSV projection and SVG plots.

A report is written as ``<stem>.json``; wall-clock information goes to a
``<stem>.timing.json`` sidecar so that the report itself, and its hash, are
identical for identical seeds and configuration.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ParseError

__all__ = ["SCHEMA", "PROVENANCE", "Record", "Report", "close_record", "equal_record",
           "bound_record", "write_report", "load_report", "records_csv", "plot_report"]

SCHEMA = 1
PROVENANCE = ("paper", "trivial", "derived")


def _clean(obj: Any) -> Any:
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return str(obj)


@dataclass
class Record:
    name: str
    inputs: dict
    expected: Any
    observed: Any
    tolerance: float | None
    passed: bool
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"provenance must be one of {PROVENANCE}")
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return _clean({"name": self.name, "inputs": self.inputs, "expected": self.expected,
                       "observed": self.observed, "tolerance": self.tolerance,
                       "pass": self.passed, "provenance": self.provenance})


def close_record(name, inputs, expected, observed, tol, provenance="derived") -> Record:
    """``|observed - expected| <= tol`` (equal infinities also pass)."""
    if math.isinf(expected) or math.isinf(observed):
        ok = expected == observed
    else:
        ok = abs(observed - expected) <= tol
    return Record(name, inputs, expected, observed, tol, ok, provenance)


def equal_record(name, inputs, expected, observed, provenance="derived") -> Record:
    return Record(name, inputs, expected, observed, None, expected == observed, provenance)


def bound_record(name, inputs, upper, observed, tol=0.0, provenance="derived") -> Record:
    """``observed <= upper + tol``."""
    return Record(name, inputs, f"<= {upper!r}", observed, tol,
                  observed <= upper + tol, provenance)


@dataclass
class Report:
    command: str
    seed: int | None = None
    config: dict = field(default_factory=dict)
    records: list[Record] = field(default_factory=list)
    series: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    extra_files: dict = field(default_factory=dict)   # file name -> text, written beside the report

    def add(self, *records: Record) -> None:
        self.records.extend(records)

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_pass else 1

    def body(self) -> dict:
        from . import __version__
        recs = [r.to_dict() for r in self.records]
        return _clean({
            "schema": SCHEMA,
            "tool": "friedrichs-bc",
            "version": __version__,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "records": recs,
            "series": self.series,
            "tables": self.tables,
            "summary": {"total": len(recs), "passed": sum(r["pass"] for r in recs),
                        "failed": sum(not r["pass"] for r in recs)},
        })

    def digest(self) -> str:
        canon = json.dumps(self.body(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def to_json(self) -> str:
        doc = self.body()
        doc["hash"] = self.digest()
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def records_csv(records: list[Record]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "pass", "expected", "observed", "tolerance", "provenance", "inputs"])
    for r in records:
        d = r.to_dict()
        w.writerow([d["name"], int(d["pass"]), json.dumps(d["expected"]),
                    json.dumps(d["observed"]), json.dumps(d["tolerance"]), d["provenance"],
                    json.dumps(d["inputs"], sort_keys=True)])
    return buf.getvalue()


def write_report(report: Report, out_dir, stem: str) -> Path:
    """Write ``<stem>.json``, ``<stem>_records.csv`` and the timing sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{stem}.json"
    path.write_text(report.to_json())
    (out / f"{stem}_records.csv").write_text(records_csv(report.records))
    timing = dict(report.timing)
    timing.setdefault("written_at", time.strftime("%Y-%m-%dT%H:%M:%S%z"))
    (out / f"{stem}.timing.json").write_text(json.dumps(_clean(timing), indent=2) + "\n")
    return path


def load_report(path) -> dict:
    """Read and validate a report written by :func:`write_report`."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise ParseError(f"{path}: not a schema-{SCHEMA} report")
    for key in ("records", "series"):
        if key in doc and not isinstance(doc[key], (list if key == "records" else dict)):
            raise ParseError(f"{path}: field {key!r} has the wrong type")
    return doc


def plot_report(doc: dict, svg_out) -> int:
    """Line plot of every series in a report; returns the number of polylines."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "friedrichs-bc"
    fig, ax = plt.subplots(figsize=(6, 4))
    count = 0
    positive = True
    for title, series in sorted(doc.get("series", {}).items()):
        if not isinstance(series, dict) or "x" not in series or "lines" not in series:
            raise ParseError(f"series {title!r} lacks 'x'/'lines'")
        x = [float(v) for v in series["x"]]
        for label, ys in series["lines"].items():
            y = [float(v) for v in ys]
            if len(y) != len(x):
                raise ParseError(f"series {title!r}/{label!r} length mismatch")
            positive &= all(v > 0 for v in y if math.isfinite(v))
            ax.plot(x, y, marker=".", label=f"{title}: {label}")
            count += 1
        ax.set_xlabel(series.get("xlabel", "x"))
        ax.set_ylabel(series.get("ylabel", "y"))
    if count:
        if positive:
            ax.set_yscale("log")
        if count <= 12:
            ax.legend(fontsize=6)
    ax.set_title(doc.get("command", ""))
    fig.tight_layout()
    fig.savefig(svg_out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return count
