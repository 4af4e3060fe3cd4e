"""Adaptive neural domain refinement.

The time domain starts as one subdomain. Each attempt trains a fresh model
on the current subdomain and evaluates the cost on the verification points.
If that verification error exceeds ``sigma`` the rightmost subdomain is split,
any other subdomain is shrunk from the right, unless it is already small or
the last shrink did not help, in which case the learning rate (then the
hidden-layer size) is raised instead. Accepted subdomains hand their end
value on as the next initial value.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import metrics, scnf
from .optimizer import TrainConfig, train
from .problems import IvpProblem, rk4_reference
from .scnf import Ansatz, ScnfModel, SubdomainGrid, make_grid

log = logging.getLogger(__name__)


class NeuronCapExceeded(RuntimeError):
    pass


@dataclass
class AndreConfig:
    sigma: float
    delta: float = 0.5
    min_subdomain_size: float = 0.1
    n_tp: int = 9
    n_vp: int = 11
    order: int = 5
    ansatz: Ansatz = Ansatz.HARD_IC
    train: TrainConfig = field(default_factory=TrainConfig)
    lr_ladder: tuple = (1e-3, 6e-3, 3.6e-2)
    neuron_increment: int = 2
    hidden_count: int = 5
    neuron_cap: int = 51
    # start re-entries from the previous attempt's weights instead of zeros
    warm_start: bool = False
    # RK4 steps for the error reference of problems without a closed form; 0 disables
    reference_steps: int = 1000

    def __post_init__(self):
        self.ansatz = Ansatz(self.ansatz)
        self.lr_ladder = tuple(float(a) for a in self.lr_ladder)
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not self.lr_ladder or any(b <= a for a, b in zip(self.lr_ladder, self.lr_ladder[1:])):
            raise ValueError("learning-rate ladder must be nonempty and strictly increasing")
        if self.hidden_count < 1 or self.hidden_count > self.neuron_cap:
            raise ValueError("hidden_count must lie in [1, neuron_cap]")
        if self.order < 1 or self.neuron_increment < 1:
            raise ValueError("order and neuron_increment must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ansatz"] = self.ansatz.value
        d["lr_ladder"] = list(self.lr_ladder)
        return d


@dataclass
class SolutionPiece:
    index: int
    grid: SubdomainGrid
    model: ScnfModel
    handoff: np.ndarray
    e_tp: float
    e_vp: float
    attempts: int
    hidden_count: int
    alpha: float


@dataclass
class RefinementState:
    """Boundaries ``t_1 < ... < t_{h+1}`` and the active subdomain ``l``
    (0-based here: subdomain ``l`` is ``[boundaries[l], boundaries[l+1]]``)."""

    boundaries: list[float]
    initial_value: np.ndarray
    l: int = 0
    rung: int = 0
    hidden_count: int = 5
    prev_e_vp: float | None = None
    e_vp: float | None = None
    attempts: int = 0
    pieces: list[SolutionPiece] = field(default_factory=list)

    @classmethod
    def start(cls, problem: IvpProblem, config: AndreConfig) -> "RefinementState":
        return cls([problem.t_start, problem.t_end], problem.u0.copy(), hidden_count=config.hidden_count)

    @property
    def h(self) -> int:
        return len(self.boundaries) - 1

    @property
    def t_left(self) -> float:
        return self.boundaries[self.l]

    @property
    def t_right(self) -> float:
        return self.boundaries[self.l + 1]

    @property
    def width(self) -> float:
        return self.t_right - self.t_left

    @property
    def is_rightmost(self) -> bool:
        return self.l == self.h - 1


def split_rightmost(state: RefinementState, delta: float) -> RefinementState:
    """Insert ``t_l + delta (t_end - t_l)``; the old right end moves to a
    new last subdomain."""
    if not state.is_rightmost:
        raise ValueError("only the rightmost subdomain can be split")
    new = state.t_left + delta * (state.t_right - state.t_left)
    state.boundaries.insert(state.l + 1, new)
    return state


def reduce_subdomain(state: RefinementState, delta: float) -> RefinementState:
    """Move the active subdomain's right boundary to
    ``t_l + delta (t_{l+1} - t_l)``; the next subdomain absorbs the rest."""
    if state.is_rightmost:
        raise ValueError("the rightmost subdomain is split, not reduced")
    state.boundaries[state.l + 1] = state.t_left + delta * (state.t_right - state.t_left)
    return state


def complex_conditions(state: RefinementState, min_size: float = 0.1) -> bool:
    """True if the active subdomain is already small or the verification
    error did not improve on the previous attempt for this subdomain."""
    if state.width <= min_size:
        return True
    if state.prev_e_vp is None or state.e_vp is None:
        return False
    return state.prev_e_vp <= state.e_vp


def adjust_parameters(state: RefinementState, config: AndreConfig) -> str:
    """Advance the learning-rate ladder; once exhausted add neurons and
    restart the ladder. Returns a short description of the change."""
    if state.rung + 1 < len(config.lr_ladder):
        state.rung += 1
        return f"alpha->{config.lr_ladder[state.rung]:g}"
    if state.hidden_count + config.neuron_increment > config.neuron_cap:
        raise NeuronCapExceeded(
            f"subdomain {state.l + 1} [{state.t_left:g}, {state.t_right:g}] would need "
            f"{state.hidden_count + config.neuron_increment} hidden neurons (cap {config.neuron_cap})"
        )
    state.hidden_count += config.neuron_increment
    state.rung = 0
    return f"H->{state.hidden_count}"


def reset_parameters(state: RefinementState, config: AndreConfig) -> None:
    state.rung = 0
    state.hidden_count = config.hidden_count
    state.prev_e_vp = None
    state.e_vp = None
    state.attempts = 0


def verify(model: ScnfModel, problem: IvpProblem, grid: SubdomainGrid) -> float:
    """Cost on the verification points; non-finite maps to ``inf``."""
    value = scnf.cost(model, problem, grid.verification_points)
    return value if math.isfinite(value) else math.inf


def handoff(model: ScnfModel, t_boundary: float) -> np.ndarray:
    return scnf.trial_value(model, float(t_boundary))


def _reference(problem: IvpProblem, config: AndreConfig):
    if problem.has_solution:
        return problem.solution, "analytical"
    if config.reference_steps > 0:
        return rk4_reference(problem, config.reference_steps), f"rk4-{config.reference_steps}"
    return None, None


def run(problem: IvpProblem, config: AndreConfig) -> metrics.RunReport:
    """Solve ``problem`` on its whole domain; returns the run report.

    A run aborts (status ``"aborted"``) when a subdomain would need more
    hidden neurons than ``config.neuron_cap``; the report then covers the
    verified subdomains only.
    """
    started = time.perf_counter()
    state = RefinementState.start(problem, config)
    attempts: list[metrics.AttemptRecord] = []
    total_epochs = 0
    previous: ScnfModel | None = None
    status, message = "completed", ""

    while True:
        alpha = config.lr_ladder[state.rung]
        grid = make_grid(state.t_left, state.t_right, config.n_tp, config.n_vp)
        model = ScnfModel.zeros(
            config.order, state.hidden_count, state.initial_value, state.t_left, config.ansatz, state.t_right
        )
        if config.warm_start and previous is not None and previous.weights.shape == model.weights.shape:
            model.weights[...] = previous.weights
        result = train(model, problem, grid, replace(config.train, alpha=alpha))
        total_epochs += result.cost_trace.size
        trained = result.model
        e_vp = math.inf if result.diverged else verify(trained, problem, grid)
        state.attempts += 1
        state.prev_e_vp, state.e_vp = state.e_vp, e_vp
        previous = trained
        record = metrics.AttemptRecord(
            state.l + 1, state.attempts, state.t_left, state.t_right, state.hidden_count, alpha,
            result.e_tp, e_vp, int(result.cost_trace.size), "", result.diverged_at,
        )
        attempts.append(record)

        if e_vp <= config.sigma:
            record.action = "accept"
            state.pieces.append(SolutionPiece(
                state.l + 1, grid, trained, handoff(trained, state.t_right), result.e_tp, e_vp,
                state.attempts, state.hidden_count, alpha,
            ))
            log.info("D%d [%.6g, %.6g] accepted: E_TP=%.4e E_VP=%.4e H=%d alpha=%g",
                     state.l + 1, state.t_left, state.t_right, result.e_tp, e_vp, state.hidden_count, alpha)
            if state.is_rightmost:
                break
            state.initial_value = state.pieces[-1].handoff
            state.l += 1
            reset_parameters(state, config)
            previous = None
            continue

        if state.is_rightmost:
            record.action = "split"
            split_rightmost(state, config.delta)
        elif complex_conditions(state, config.min_subdomain_size):
            try:
                record.action = "adjust " + adjust_parameters(state, config)
            except NeuronCapExceeded as exc:
                record.action = "abort"
                status, message = "aborted", str(exc)
                log.warning("run aborted: %s", exc)
                break
        else:
            record.action = "reduce"
            reduce_subdomain(state, config.delta)
        log.info("D%d [%.6g, %.6g] E_TP=%.4e E_VP=%.4e -> %s",
                 record.subdomain, record.t_left, record.t_right, result.e_tp, e_vp, record.action)

    return build_report(problem, config, state, attempts, total_epochs,
                        time.perf_counter() - started, status, message)


def build_report(problem, config, state, attempts, total_epochs, wall_time, status, message):
    reference, ref_kind = _reference(problem, config)
    records = []
    for p in state.pieces:
        l1, linf = metrics.subdomain_errors(p, reference)
        records.append(metrics.SubdomainRecord(
            p.index, p.grid.t_left, p.grid.t_right, p.e_tp, p.e_vp, p.hidden_count, p.alpha, p.attempts, l1, linf,
        ))
    verified = [p.grid.t_left for p in state.pieces] + ([state.pieces[-1].grid.t_right] if state.pieces else [])
    return metrics.RunReport(
        problem={
            "name": problem.name,
            "description": problem.description,
            "t_start": problem.t_start,
            "t_end": problem.t_end,
            "u0": problem.u0.tolist(),
            "params": dict(problem.params),
        },
        config=config.to_dict(),
        status=status,
        boundaries=list(state.boundaries) if status == "completed" else verified,
        subdomains=records,
        attempts=attempts,
        aggregates=metrics.compute_aggregates(records, total_epochs, wall_time),
        metrics_info={
            "points": "training",
            "reference": ref_kind,
            "system_convention": metrics.SYSTEM_CONVENTION if problem.dimension > 1 else None,
        },
        solution=metrics.solution_table(state.pieces, reference, problem.dimension),
        models=[
            {
                "index": p.index,
                "t0": p.model.t0,
                "t_right": p.grid.t_right,
                "ansatz": p.model.ansatz.value,
                "initial_value": p.model.initial_value.tolist(),
                "weights": p.model.weights.tolist(),
            }
            for p in state.pieces
        ],
        message=message,
    )


def pieces_from_report(report: metrics.RunReport) -> list[ScnfModel]:
    """Rebuild the trained subdomain models stored in a report."""
    return [
        ScnfModel(np.array(m["weights"]), np.array(m["initial_value"]), m["t0"], m["ansatz"], m["t_right"])
        for m in report.models
    ]


def evaluate_solution(report: metrics.RunReport, t) -> np.ndarray:
    """Piecewise solution at arbitrary ``t`` inside the solved range."""
    models = pieces_from_report(report)
    if not models:
        raise ValueError("report has no verified subdomains")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lefts = np.array([m.t0 for m in models])
    idx = np.clip(np.searchsorted(lefts, t, side="right") - 1, 0, len(models) - 1)
    out = np.empty((models[0].equations, t.size))
    for i, model in enumerate(models):
        mask = idx == i
        if mask.any():
            out[:, mask] = scnf.trial_value(model, t[mask])
    return out
