"""Parameter sweeps over sigma or delta."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import refinement
from .export import _write_csv, export

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ["value", "status", "h", "l1", "linf", "mean_e_vp", "mean_e_tp", "total_epochs", "message"]


def default_workers() -> int:
    env = os.environ.get("ANDRE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _one(problem, config, parameter, value, out_dir):
    try:
        report = refinement.run(problem, replace(config, **{parameter: float(value)}))
    except Exception as exc:  # recorded in-row, the sweep carries on
        log.exception("run with %s=%g failed", parameter, value)
        return {"value": float(value), "status": "error", "message": str(exc)}
    if out_dir is not None:
        export(report, Path(out_dir) / f"{parameter}_{value:g}")
    agg = report.aggregates
    return {
        "value": float(value),
        "status": report.status,
        "h": agg["h"],
        "l1": agg["l1"],
        "linf": agg["linf"],
        "mean_e_vp": agg["mean_e_vp"],
        "mean_e_tp": agg["mean_e_tp"],
        "total_epochs": agg["total_epochs"],
        "message": report.message,
    }


def sweep(problem, config, parameter: str, values, workers: int | None = None, out_dir=None) -> list[dict]:
    """One full refinement run per value of ``sigma`` or ``delta``.

    Rows come back in the order of ``values``. Runs share no state, so
    ``workers > 1`` distributes them over processes.
    """
    if parameter not in ("sigma", "delta"):
        raise ValueError("parameter must be 'sigma' or 'delta'")
    values = [float(v) for v in values]
    if not values:
        raise ValueError("values must be nonempty")
    workers = min(workers or default_workers(), len(values))
    if workers <= 1:
        rows = [_one(problem, config, parameter, v, out_dir) for v in values]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_one, problem, config, parameter, v, out_dir) for v in values]
            rows = [f.result() for f in futures]
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        _write_csv(Path(out_dir) / "sweep.csv", SWEEP_COLUMNS, ([row.get(c) for c in SWEEP_COLUMNS] for row in rows))
    return rows
