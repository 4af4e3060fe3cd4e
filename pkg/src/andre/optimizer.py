"""Full-batch Adam training of a subdomain model with incremental learning."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import scnf
from .scnf import Ansatz, ScnfModel, SubdomainGrid

log = logging.getLogger(__name__)


class TrainingDiverged(ArithmeticError):
    """Raised when a cost or gradient becomes non-finite."""

    def __init__(self, epoch: int):
        super().__init__(f"training diverged at epoch {epoch}")
        self.epoch = epoch


@dataclass
class AdamState:
    size: int
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: np.ndarray = field(default=None, repr=False)
    v: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.m is None:
            self.m = np.zeros(self.size)
        if self.v is None:
            self.v = np.zeros(self.size)


def adam_step(state: AdamState, weights: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    """One bias-corrected Adam update; returns the new weight vector."""
    weights = np.asarray(weights, dtype=float)
    gradient = np.asarray(gradient, dtype=float)
    if weights.shape != gradient.shape or weights.size != state.size:
        raise ValueError("weights, gradient and Adam moments must have equal length")
    if not np.all(np.isfinite(gradient)):
        raise TrainingDiverged(state.step + 1)
    state.step += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * gradient * gradient
    m_hat = state.m / (1.0 - state.beta1 ** state.step)
    v_hat = state.v / (1.0 - state.beta2 ** state.step)
    return weights - state.alpha * m_hat / (np.sqrt(v_hat) + state.eps)


@dataclass
class TrainConfig:
    epochs: int = 100_000
    increments: int = 5
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    # stop once the full-set training cost drops below this; 0 disables
    stop_below: float = 0.0
    # "auto" uses the compiled loop when the residual kernel is a numba function
    backend: str = "auto"

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.increments < 1:
            raise ValueError("increments must be at least 1")
        if self.backend not in ("auto", "numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")


def incremental_schedule(n_points: int, increments: int) -> list[int]:
    """Prefix sizes for incremental learning, evenly rounded, ending at
    ``n_points``. ``(10, 5) -> [2, 4, 6, 8, 10]``."""
    if n_points < 1 or increments < 1:
        raise ValueError("n_points and increments must be positive")
    if increments > n_points:
        warnings.warn(f"{increments} increments for {n_points} points; clamped to {n_points}")
        increments = n_points
    return [(2 * k * n_points + increments) // (2 * increments) for k in range(1, increments + 1)]


def epoch_split(epochs: int, increments: int) -> list[int]:
    per, rest = divmod(epochs, increments)
    split = [per] * increments
    split[-1] += rest
    return split


@dataclass
class TrainResult:
    model: ScnfModel
    e_tp: float
    history: list[dict]
    cost_trace: np.ndarray
    diverged_at: int | None = None

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None


def _use_numba(problem, backend: str) -> bool:
    if backend == "numpy":
        return False
    jitted = hasattr(problem.terms, "py_func")
    if backend == "numba" and not jitted:
        raise ValueError(f"problem {problem.name!r} has no numba residual kernel")
    return jitted


def _train_numba(model, problem, points, prefixes, epochs, config, trace):
    from ._kernels import train_loop

    P, dP = scnf.basis(model.ansatz, model.order, points, model.t0)
    offset = model.initial_value if model.ansatz is Ansatz.HARD_IC else np.zeros(model.equations)
    return train_loop(
        model.weights, points, P, dP, np.ascontiguousarray(offset, dtype=float),
        model.initial_value, model.ansatz is Ansatz.LEARNED_IC,
        np.asarray(prefixes, dtype=np.int64), np.asarray(epochs, dtype=np.int64),
        problem.terms, problem.constants,
        config.alpha, config.beta1, config.beta2, config.eps, config.stop_below, trace,
    )


def _train_numpy(model, problem, points, prefixes, epochs, config, trace):
    done = 0
    last = len(prefixes) - 1
    for j, (n, count) in enumerate(zip(prefixes, epochs)):
        state = AdamState(model.n_weights, config.alpha, config.beta1, config.beta2, config.eps)
        active = points[:n]
        for _ in range(count):
            value, grad = scnf.cost_and_gradient(model, problem, active)
            trace[done] = value
            if not math.isfinite(value):
                return done, done
            try:
                model.weights[...] = adam_step(state, model.flat_weights(), grad).reshape(model.weights.shape)
            except TrainingDiverged:
                return done, done
            done += 1
            if j == last and config.stop_below > 0.0 and value < config.stop_below:
                return done, -1
    return done, -1


def train(model: ScnfModel, problem, grid: SubdomainGrid, config: TrainConfig | None = None) -> TrainResult:
    """Train a copy of ``model`` on the grid's training points.

    Each prefix of the incremental schedule gets ``epochs // increments``
    epochs (the remainder goes to the last one); weights carry over between
    prefixes. The returned ``e_tp`` is the cost on all training points.
    """
    config = config or TrainConfig()
    model = model.copy()
    points = np.ascontiguousarray(grid.training_points, dtype=float)
    if points[0] != model.t0:
        raise ValueError("first training point must be the model anchor t0")
    prefixes = incremental_schedule(points.size, config.increments)
    epochs = epoch_split(config.epochs, len(prefixes))
    trace = np.full(config.epochs, np.nan)
    runner = _train_numba if _use_numba(problem, config.backend) else _train_numpy
    with np.errstate(all="ignore"):
        done, diverged = runner(model, problem, points, prefixes, epochs, config, trace)
    trace = trace[: done + (diverged >= 0)]

    history = []
    start = 0
    for n, count in zip(prefixes, epochs):
        seg = trace[start : start + count]
        if seg.size:
            history.append({"points": n, "epochs": int(seg.size), "cost_first": float(seg[0]), "cost_last": float(seg[-1])})
        start += count
    if diverged >= 0:
        log.info("training diverged at epoch %d on [%g, %g]", diverged, grid.t_left, grid.t_right)
        return TrainResult(model, math.inf, history, trace, int(diverged))
    return TrainResult(model, scnf.cost(model, problem, points), history, trace)
