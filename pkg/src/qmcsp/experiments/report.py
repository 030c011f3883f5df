"""Report emission: CSV records, JSON summary and a gnuplot box-plot table."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from itertools import groupby
from pathlib import Path

import numpy as np

from .rates import fit_rate

CSV_COLUMNS = ("test_kind", "sampler", "factorization", "n", "repeat", "rmse", "runtime_s")


@dataclass(frozen=True, order=True)
class RmseRecord:
    """Relative RMSE over R replications for one (sampler, factorization, n, repeat)."""

    test_kind: str
    sampler: str
    factorization: str
    n: int
    repeat: int
    rmse: float
    runtime_s: float = 0.0
    reference: float = field(default=math.nan, compare=False)
    estimates: tuple[float, ...] = field(default=(), compare=False)

    @classmethod
    def from_estimates(cls, test_kind, sampler, factorization, n, repeat, estimates,
                       reference, runtime_s=0.0) -> "RmseRecord":
        est = np.asarray(estimates, dtype=np.float64)
        if est.size < 2:
            raise ValueError("RMSE needs at least 2 replications")
        if reference == 0:
            raise ValueError("relative RMSE undefined for a zero reference")
        rmse = float(np.sqrt(np.mean(((est - reference) / reference) ** 2)))
        return cls(test_kind, sampler, factorization, int(n), int(repeat), rmse,
                   float(runtime_s), float(reference), tuple(float(v) for v in est))

    @property
    def key(self):
        return (self.test_kind, self.sampler, self.factorization, self.n, self.repeat)

    def row(self) -> "RmseRecord":
        """The CSV-visible part of the record."""
        return RmseRecord(*self.key, self.rmse, self.runtime_s)


def _fmt(v) -> str:
    return format(v, ".17g") if isinstance(v, float) else str(v)


def nearest_rank(values, p: float) -> float:
    """Nearest-rank percentile: the ceil(p*N)-th smallest value (1-based)."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        raise ValueError("no values")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    return float(v[max(math.ceil(p * v.size), 1) - 1])


def quartiles(values) -> tuple[float, float, float]:
    return tuple(nearest_rank(values, p) for p in (0.25, 0.5, 0.75))


def _groups(records):
    key = lambda r: (r.test_kind, r.sampler, r.factorization)
    for g, items in groupby(sorted(records), key=key):
        yield g, list(items)


def summarize(records) -> dict:
    """Per (test_kind, sampler, factorization): box-plot stats and rate fit."""
    out = []
    for (kind, sampler, fact), items in _groups(records):
        sizes = sorted({r.n for r in items})
        repeats = sorted({r.repeat for r in items})
        table = {(r.n, r.repeat): r.rmse for r in items}
        boxes = []
        for n in sizes:
            vals = [r.rmse for r in items if r.n == n]
            q1, med, q3 = quartiles(vals)
            boxes.append({"n": n, "min": min(vals), "q1": q1, "median": med, "q3": q3,
                          "max": max(vals), "count": len(vals)})
        entry = {"test_kind": kind, "sampler": sampler, "factorization": fact,
                 "sizes": sizes, "boxes": boxes, "rate": None}
        full = [rep for rep in repeats if all((n, rep) in table for n in sizes)]
        if len(sizes) >= 3 and full:
            mat = [[table[n, rep] for n in sizes] for rep in full]
            entry["rate"] = fit_rate(sizes, mat).to_dict()
        refs = sorted({r.reference for r in items if not math.isnan(r.reference)})
        if refs:
            entry["reference"] = refs if len(refs) > 1 else refs[0]
        out.append(entry)
    return {"groups": out, "quartile_convention": "nearest-rank ceil(p*N)"}


@dataclass(frozen=True)
class ReportPaths:
    csv: Path
    json: Path
    gnuplot: Path | None


def write_records_csv(records, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in sorted(records):
                w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write report CSV {path}: {exc}") from exc
    return path


def read_report_csv(path) -> list[RmseRecord]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OSError(f"cannot read report CSV {path}: {exc}") from exc
    return [RmseRecord(r["test_kind"], r["sampler"], r["factorization"], int(r["n"]),
                       int(r["repeat"]), float(r["rmse"]), float(r["runtime_s"]))
            for r in rows]


def write_gnuplot(records, path) -> Path:
    """One block per group: ``n min q1 median q3 max`` (candlesticks order)."""
    path = Path(path)
    lines = []
    for g in summarize(records)["groups"]:
        lines.append(f"# {g['test_kind']} {g['sampler']} {g['factorization']}")
        lines.append("# n min q1 median q3 max")
        for b in g["boxes"]:
            lines.append(" ".join(_fmt(b[k]) if k != "n" else str(b[k])
                                  for k in ("n", "min", "q1", "median", "q3", "max")))
        lines += ["", ""]
    try:
        path.write_text("\n".join(lines))
    except OSError as exc:
        raise OSError(f"cannot write gnuplot file {path}: {exc}") from exc
    return path


def emit_report(records, path, gnuplot: bool = True, meta: dict | None = None) -> ReportPaths:
    """Write ``<path>.csv``, ``<path>.json`` and optionally ``<path>_box.dat``.

    ``path`` is a file stem; an existing directory gets the stem ``report``.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to report")
    path = Path(path)
    if path.is_dir():
        path = path / "report"
    if not path.parent.exists():
        raise OSError(f"report directory {path.parent} does not exist")
    csv_path = write_records_csv(records, path.with_suffix(".csv"))
    summary = summarize(records)
    if meta:
        summary["meta"] = meta
    json_path = path.with_suffix(".json")
    try:
        json_path.write_text(json.dumps(summary, indent=2, sort_keys=True))
    except OSError as exc:
        raise OSError(f"cannot write report JSON {json_path}: {exc}") from exc
    gp = write_gnuplot(records, path.parent / f"{path.name}_box.dat") if gnuplot else None
    return ReportPaths(csv_path, json_path, gp)
