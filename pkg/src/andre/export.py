"""Flat-file export of run reports: ``summary.json`` plus CSV tables."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

from .metrics import RunReport

SUBDOMAIN_COLUMNS = ["l", "t_left", "t_right", "E_TP", "E_VP", "H", "alpha", "attempts", "l1", "linf"]
ATTEMPT_COLUMNS = ["l", "attempt", "t_left", "t_right", "H", "alpha", "E_TP", "E_VP", "epochs", "action", "diverged_at"]


def _clean(obj):
    # strict JSON: non-finite floats become null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return int(value)
    return value


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def export(report: RunReport, out_dir) -> list[Path]:
    """Write ``summary.json``, ``subdomains.csv``, ``solution.csv``,
    ``boundaries.csv`` and ``attempts.csv`` into ``out_dir``.

    Floats are written in shortest round-trip form.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / n for n in ("summary.json", "subdomains.csv", "solution.csv", "boundaries.csv", "attempts.csv")]
        paths[0].write_text(json.dumps(_clean(report.to_dict()), indent=1, allow_nan=False) + "\n")

        _write_csv(paths[1], SUBDOMAIN_COLUMNS, (
            [r.index, r.t_left, r.t_right, r.e_tp, r.e_vp, r.hidden_count, r.alpha, r.attempts, r.l1, r.linf]
            for r in report.subdomains
        ))

        cols = list(report.solution)
        n_rows = len(report.solution.get("t", []))
        _write_csv(paths[2], cols, ([report.solution[c][i] for c in cols] for i in range(n_rows)))

        _write_csv(paths[3], ["index", "t"], enumerate(report.boundaries, start=1))

        _write_csv(paths[4], ATTEMPT_COLUMNS, (list(asdict(a).values()) for a in report.attempts))
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return paths


def load_summary(path) -> RunReport:
    """Read a ``summary.json`` (or the directory holding it)."""
    path = Path(path)
    if path.is_dir():
        path = path / "summary.json"
    with open(path) as fh:
        return RunReport.from_dict(json.load(fh))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
