"""Verification reports: per-check records, JSON serialization and CSV sidecars."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

REPORT_NAME = "report.json"


@dataclass(frozen=True)
class CheckRecord:
    """One verified inequality.  ``margin`` is the signed slack (rhs - lhs for
    two-sided records); the check passes iff margin >= -tolerance."""

    name: str
    margin: float
    tolerance: float = 0.0
    lhs: float | None = None
    rhs: float | None = None
    detail: str = ""

    @classmethod
    def sides(cls, name: str, lhs: float, rhs: float, tolerance: float, detail: str = "") -> CheckRecord:
        return cls(name, rhs - lhs, tolerance, lhs, rhs, detail)

    @classmethod
    def flag(cls, name: str, ok: bool, detail: str = "") -> CheckRecord:
        return cls(name, 1.0 if ok else -1.0, 0.0, None, None, detail)

    @property
    def status(self) -> str:
        ok = not math.isnan(self.margin) and self.margin >= -self.tolerance
        return "pass" if ok else "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "status": self.status,
            "detail": self.detail,
        }


@dataclass
class Series:
    columns: tuple[str, ...]
    data: np.ndarray


@dataclass
class VerificationReport:
    command: str
    config_name: str = ""
    config_sha256: str = ""
    seed: int = 0
    environment: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def add_series(self, name: str, columns, *arrays):
        self.series[name] = Series(tuple(columns), np.column_stack([np.asarray(a, dtype=float) for a in arrays]))

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "status": self.status,
            "provenance": {"config": self.config_name, "config_sha256": self.config_sha256, "seed": self.seed},
            "environment": self.environment,
            "checks": [c.to_dict() for c in self.checks],
            "results": self.results,
            "sidecars": sorted(f"{k}.csv" for k in self.series),
        }

    def to_json(self) -> str:
        return json.dumps(jsonable(self.to_dict()), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def summary_lines(self) -> list[str]:
        lines = [f"{c.status.upper():4s}  {c.name}" for c in self.checks]
        lines.append(f"overall: {self.status} ({sum(c.status == 'pass' for c in self.checks)}/{len(self.checks)})")
        return lines

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        target = out / REPORT_NAME
        target.write_text(self.to_json())
        emit_plot_data(self, out)
        return target


def jsonable(x):
    """Plain JSON types; non-finite floats become the strings "inf", "-inf", "nan"."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return x


def emit_plot_data(report: VerificationReport, out_dir: str | Path) -> list[Path]:
    """One CSV per series, header row = column names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(report.series):
        s = report.series[name]
        path = out / f"{name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(s.columns)
            for row in s.data:
                w.writerow([repr(float(v)) for v in row])
        written.append(path)
    return written


__all__ = ["CheckRecord", "VerificationReport", "Series", "emit_plot_data", "jsonable", "REPORT_NAME"]
