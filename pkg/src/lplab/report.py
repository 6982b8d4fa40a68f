"""Verification records, aggregates, reports, and their file outputs.

A report is fully determined by its records: every verdict is a pure
function of the recorded numbers, and two runs with the same config and
seed produce byte-identical output except for the volatile metadata
(timestamp, runtime).
"""

from __future__ import annotations

import copy
import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

#: metadata keys that legitimately differ between identical runs
VOLATILE_META = ("timestamp", "runtime_seconds")


@dataclass
class Record:
    """One measured point of a sweep."""

    params: dict
    lhs: float | None = None
    rhs: float | None = None
    ratio: float | None = None
    skip: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"params": self.params}
        for key in ("lhs", "rhs", "ratio", "skip"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.extra:
            out["extra"] = self.extra
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Record":
        return cls(
            params=d.get("params", {}),
            lhs=d.get("lhs"),
            rhs=d.get("rhs"),
            ratio=d.get("ratio"),
            skip=d.get("skip"),
            extra=d.get("extra", {}),
        )


@dataclass
class Aggregate:
    """Summary statistics of one sweep cell (one threshold decision)."""

    cell: dict
    n_points: int
    max: float | None = None
    median: float | None = None
    max_over_median: float | None = None
    slope: float | None = None
    slope_stderr: float | None = None
    passed: bool | None = None
    note: str = ""
    profile: list | None = None  # optional [(x, value), ...] series

    def to_dict(self) -> dict:
        out = {"cell": self.cell, "n_points": self.n_points}
        for key in (
            "max",
            "median",
            "max_over_median",
            "slope",
            "slope_stderr",
            "passed",
        ):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.note:
            out["note"] = self.note
        if self.profile is not None:
            out["profile"] = [list(p) for p in self.profile]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Aggregate":
        return cls(
            cell=d.get("cell", {}),
            n_points=d.get("n_points", 0),
            max=d.get("max"),
            median=d.get("median"),
            max_over_median=d.get("max_over_median"),
            slope=d.get("slope"),
            slope_stderr=d.get("slope_stderr"),
            passed=d.get("passed"),
            note=d.get("note", ""),
            profile=[tuple(p) for p in d["profile"]] if "profile" in d else None,
        )


@dataclass
class VerificationReport:
    suite: str
    config: dict
    records: list
    aggregates: list
    verdict: str
    skips: dict = field(default_factory=dict)
    tail_notes: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
            "aggregates": [a.to_dict() for a in self.aggregates],
            "verdict": self.verdict,
            "skips": self.skips,
            "tail_notes": self.tail_notes,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(
            suite=d["suite"],
            config=d["config"],
            records=[Record.from_dict(r) for r in d["records"]],
            aggregates=[Aggregate.from_dict(a) for a in d["aggregates"]],
            verdict=d["verdict"],
            skips=d.get("skips", {}),
            tail_notes=d.get("tail_notes", []),
            meta=d.get("meta", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "VerificationReport":
        return cls.from_dict(json.loads(Path(path).read_text()))


def strip_volatile(report_dict: dict) -> dict:
    """Copy of a report dict with the volatile metadata removed."""
    out = copy.deepcopy(report_dict)
    meta = out.get("meta", {})
    for key in VOLATILE_META:
        meta.pop(key, None)
    return out


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.-]+", "-", text).strip("-")


def _cell_slug(cell: dict) -> str:
    return _slug("-".join(f"{k}{v}" for k, v in sorted(cell.items())))


def write_outputs(report: VerificationReport, outdir) -> list:
    """Emit report.json, table.csv, plot-*.csv, and summary.txt.

    Returns the list of paths written.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "report.json"
    report.save(path)
    written.append(path)

    # per-point table; the union of parameter keys, in sorted order
    keys = sorted({k for r in report.records for k in r.params})
    path = out / "table.csv"
    with open(path, "w", newline="") as fh:
        fh.write(
            "# columns: "
            + ", ".join(keys + ["lhs", "rhs", "ratio", "skip"])
            + "\n"
        )
        writer = csv.writer(fh)
        writer.writerow(keys + ["lhs", "rhs", "ratio", "skip"])
        for r in report.records:
            writer.writerow(
                [r.params.get(k, "") for k in keys]
                + [
                    "" if r.lhs is None else repr(r.lhs),
                    "" if r.rhs is None else repr(r.rhs),
                    "" if r.ratio is None else repr(r.ratio),
                    r.skip or "",
                ]
            )
    written.append(path)

    for agg in report.aggregates:
        if not agg.profile:
            continue
        path = out / f"plot-{_cell_slug(agg.cell) or 'profile'}.csv"
        with open(path, "w", newline="") as fh:
            fh.write("# columns: x, value\n")
            writer = csv.writer(fh)
            writer.writerow(["x", "value"])
            for x, v in agg.profile:
                writer.writerow([repr(x), repr(v)])
        written.append(path)

    ratios = sorted(
        r.ratio for r in report.records if r.ratio is not None and not r.skip
    )
    if ratios:
        path = out / "plot-ratios.csv"
        with open(path, "w", newline="") as fh:
            fh.write("# columns: rank, ratio (sorted ascending)\n")
            writer = csv.writer(fh)
            writer.writerow(["rank", "ratio"])
            for i, v in enumerate(ratios):
                writer.writerow([i, repr(v)])
        written.append(path)

    path = out / "summary.txt"
    with open(path, "w") as fh:
        fh.write(f"suite: {report.suite}\nverdict: {report.verdict}\n")
        fh.write(
            f"records: {len(report.records)} "
            f"(skipped {report.skips.get('count', 0)})\n"
        )
        for agg in report.aggregates:
            bits = [f"cell {agg.cell}" if agg.cell else "overall"]
            if agg.max_over_median is not None:
                bits.append(f"max/median={agg.max_over_median:.3g}")
            if agg.slope is not None:
                bits.append(f"slope={agg.slope:+.3f}")
            if agg.passed is not None:
                bits.append(PASS if agg.passed else FAIL)
            if agg.note:
                bits.append(agg.note)
            fh.write("  " + "  ".join(bits) + "\n")
        for note in report.tail_notes:
            fh.write(f"  note: {note}\n")
    written.append(path)
    return written
