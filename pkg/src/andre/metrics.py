"""Error metrics against a reference solution and the run report."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import scnf

SYSTEM_CONVENTION = "per-point absolute errors averaged over equations, then mean/max over points"


def pointwise_errors(approx: np.ndarray, exact: np.ndarray) -> np.ndarray:
    """Absolute error per point, averaged over equations for systems."""
    approx = np.atleast_2d(approx)
    exact = np.atleast_2d(exact)
    return np.mean(np.abs(exact - approx), axis=0)


def subdomain_errors(piece, reference: Callable | None, points=None):
    """``(l1, linf)``: mean and max absolute deviation from ``reference``
    at the piece's training points (or ``points`` if given).

    Returns ``(None, None)`` when there is no reference.
    """
    if reference is None:
        return None, None
    t = piece.grid.training_points if points is None else np.asarray(points, dtype=float)
    err = pointwise_errors(scnf.trial_value(piece.model, t), reference(t))
    return float(np.mean(err)), float(np.max(err))


def aggregate(l1: list[float], linf: list[float]):
    """Subdomain averages of the per-subdomain l1 and linf errors."""
    if len(l1) < 1 or len(l1) != len(linf):
        raise ValueError("need at least one subdomain and matching l1/linf lists")
    h = len(l1)
    return sum(l1) / h, sum(linf) / h


def mean(values) -> float | None:
    values = list(values)
    return sum(values) / len(values) if values else None


@dataclass
class SubdomainRecord:
    index: int
    t_left: float
    t_right: float
    e_tp: float
    e_vp: float
    hidden_count: int
    alpha: float
    attempts: int
    l1: float | None = None
    linf: float | None = None


@dataclass
class AttemptRecord:
    subdomain: int
    attempt: int
    t_left: float
    t_right: float
    hidden_count: int
    alpha: float
    e_tp: float
    e_vp: float
    epochs: int
    action: str
    diverged_at: int | None = None


@dataclass
class RunReport:
    problem: dict
    config: dict
    status: str
    boundaries: list[float]
    subdomains: list[SubdomainRecord]
    attempts: list[AttemptRecord]
    aggregates: dict
    metrics_info: dict
    solution: dict = field(default_factory=dict)
    models: list[dict] = field(default_factory=list)
    message: str = ""

    @property
    def h(self) -> int:
        return len(self.subdomains)

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "status": self.status,
            "message": self.message,
            "problem": self.problem,
            "config": self.config,
            "boundaries": list(self.boundaries),
            "aggregates": self.aggregates,
            "metrics": self.metrics_info,
            "subdomains": [asdict(r) for r in self.subdomains],
            "attempts": [asdict(a) for a in self.attempts],
            "models": self.models,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        if data.get("schema") != 1:
            raise ValueError(f"unsupported summary schema {data.get('schema')!r}")
        return cls(
            problem=data["problem"],
            config=data["config"],
            status=data["status"],
            boundaries=[float(b) for b in data["boundaries"]],
            subdomains=[SubdomainRecord(**_restore(r)) for r in data["subdomains"]],
            attempts=[AttemptRecord(**_restore(a)) for a in data["attempts"]],
            aggregates=data["aggregates"],
            metrics_info=data["metrics"],
            models=data.get("models", []),
            message=data.get("message", ""),
        )


def _restore(record: dict) -> dict:
    # non-finite costs are stored as null
    return {k: (math.inf if v is None and k in ("e_tp", "e_vp") else v) for k, v in record.items()}


def compute_aggregates(records: list[SubdomainRecord], total_epochs: int, wall_time: float) -> dict:
    agg = {
        "h": len(records),
        "l1": None,
        "linf": None,
        "mean_e_vp": mean(r.e_vp for r in records),
        "mean_e_tp": mean(r.e_tp for r in records),
        "total_epochs": total_epochs,
        "wall_time_s": wall_time,
    }
    if records and all(r.l1 is not None for r in records):
        agg["l1"], agg["linf"] = aggregate([r.l1 for r in records], [r.linf for r in records])
    return agg


def solution_table(pieces, reference: Callable | None, dimension: int) -> dict:
    """Column arrays over all pieces' training points; each piece's left
    boundary point is repeated from the previous piece and flagged."""
    cols: dict[str, list] = {"subdomain": [], "t": [], "is_left_boundary": []}
    for q in range(dimension):
        cols[f"u_{q + 1}"] = []
        if reference is not None:
            cols[f"ref_{q + 1}"] = []
            cols[f"abs_err_{q + 1}"] = []
    for piece in pieces:
        t = piece.grid.training_points
        u = scnf.trial_value(piece.model, t)
        ref = reference(t) if reference is not None else None
        cols["subdomain"].extend([piece.index] * t.size)
        cols["t"].extend(t.tolist())
        cols["is_left_boundary"].extend([1] + [0] * (t.size - 1))
        for q in range(dimension):
            cols[f"u_{q + 1}"].extend(u[q].tolist())
            if ref is not None:
                cols[f"ref_{q + 1}"].extend(ref[q].tolist())
                cols[f"abs_err_{q + 1}"].extend(np.abs(ref[q] - u[q]).tolist())
    return cols
