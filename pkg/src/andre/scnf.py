"""Subdomain collocation neural form: polynomial trial solution built from
``m`` small networks per equation, its residual, cost and weight gradient.

Two ansatz variants are supported:

* ``HARD_IC``:    u(t) = u0 + sum_{k=1..m} N_k(t) (t - t0)^k
* ``LEARNED_IC``: u(t) = N_1(t) + sum_{k=2..m} N_k(t) (t - t0)^(k-1),
  with the initial value enforced by a penalty ``0.5 (N_1(t0) - u0)^2``.

Weights of one subdomain live in a single array of shape ``(o, m, 3H+1)``
(equation, order, canonical per-network order); flattening it in C order
gives the layout used for gradients and Adam moments.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .nf_net import DenseNet1H, grad_value_weights, sigmoid, weight_count


class Ansatz(str, enum.Enum):
    HARD_IC = "hard"
    LEARNED_IC = "learned"


@dataclass(frozen=True)
class SubdomainGrid:
    t_left: float
    t_right: float
    training_points: np.ndarray
    verification_points: np.ndarray

    @property
    def width(self) -> float:
        return self.t_right - self.t_left


def _equidistant(a: float, b: float, n: int) -> np.ndarray:
    pts = a + np.arange(n + 1) * ((b - a) / n)
    pts[0], pts[-1] = a, b
    return pts


def make_grid(t_left: float, t_right: float, n_tp: int = 9, n_vp: int = 11) -> SubdomainGrid:
    """``n_tp + 1`` training and ``n_vp + 1`` verification points, both
    equidistant and including the two subdomain ends."""
    t_left, t_right = float(t_left), float(t_right)
    if not t_left < t_right:
        raise ValueError(f"degenerate subdomain [{t_left}, {t_right}]")
    if n_tp < 1 or n_vp < 1:
        raise ValueError("n_tp and n_vp must be at least 1")
    return SubdomainGrid(
        t_left, t_right, _equidistant(t_left, t_right, n_tp), _equidistant(t_left, t_right, n_vp)
    )


@dataclass
class ScnfModel:
    """Networks and anchor of one subdomain.

    ``weights`` has shape ``(equations, order, 3H+1)``.
    """

    weights: np.ndarray
    initial_value: np.ndarray
    t0: float
    ansatz: Ansatz = Ansatz.HARD_IC
    t_right: float | None = None

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.initial_value = np.atleast_1d(np.asarray(self.initial_value, dtype=float))
        self.ansatz = Ansatz(self.ansatz)
        self.t0 = float(self.t0)
        if self.weights.ndim != 3:
            raise ValueError("weights must have shape (equations, order, 3H+1)")
        if self.initial_value.shape != (self.weights.shape[0],):
            raise ValueError("initial_value length must equal the number of equations")
        if (self.weights.shape[2] - 1) % 3 or self.weights.shape[2] < 4:
            raise ValueError("last weight axis must have length 3H+1")

    @classmethod
    def zeros(cls, order, hidden_count, initial_value, t0, ansatz=Ansatz.HARD_IC, t_right=None):
        u0 = np.atleast_1d(np.asarray(initial_value, dtype=float))
        w = np.zeros((u0.size, order, weight_count(hidden_count)))
        return cls(w, u0, t0, ansatz, t_right)

    @property
    def equations(self) -> int:
        return self.weights.shape[0]

    @property
    def order(self) -> int:
        return self.weights.shape[1]

    @property
    def hidden_count(self) -> int:
        return (self.weights.shape[2] - 1) // 3

    @property
    def n_weights(self) -> int:
        return self.weights.size

    def network(self, q: int, k: int) -> DenseNet1H:
        """View of network ``k`` (0-based) of equation ``q``."""
        return DenseNet1H(self.weights[q, k])

    def flat_weights(self) -> np.ndarray:
        return self.weights.reshape(-1)

    def copy(self) -> "ScnfModel":
        return ScnfModel(self.weights.copy(), self.initial_value.copy(), self.t0, self.ansatz, self.t_right)

    def is_extrapolating(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        hi = np.inf if self.t_right is None else self.t_right
        return (t < self.t0) | (t > hi)


def basis(ansatz: Ansatz, order: int, t, t0: float):
    """Polynomial factors multiplying each network and their time derivatives.

    Returns ``(P, dP)`` of shape ``(order, n)``. Powers are built by
    repeated multiplication so results are reproducible bit for bit.
    """
    d = np.atleast_1d(np.asarray(t, dtype=float)) - t0
    powers = [np.ones_like(d)]
    for _ in range(order):
        powers.append(powers[-1] * d)
    shift = 0 if Ansatz(ansatz) is Ansatz.HARD_IC else 1
    P = np.empty((order, d.size))
    dP = np.empty((order, d.size))
    for k in range(1, order + 1):
        e = k - shift
        P[k - 1] = powers[e]
        dP[k - 1] = e * powers[e - 1] if e > 0 else 0.0
    return P, dP


class _NetTerms(NamedTuple):
    s: np.ndarray   # (o, m, H, n)
    s1: np.ndarray
    N: np.ndarray   # (o, m, n)
    Nd: np.ndarray


def _net_terms(weights: np.ndarray, t: np.ndarray) -> _NetTerms:
    H = (weights.shape[2] - 1) // 3
    nu = weights[..., :H, None]
    eta = weights[..., H : 2 * H, None]
    rho = weights[..., 2 * H : 3 * H, None]
    gamma = weights[..., 3 * H]
    s = sigmoid(nu * t + eta)
    s1 = s * (1.0 - s)
    N = np.sum(rho * s, axis=2) + gamma[..., None]
    Nd = np.sum(rho * nu * s1, axis=2)
    return _NetTerms(s, s1, N, Nd)


def _offset(model: ScnfModel) -> np.ndarray:
    if model.ansatz is Ansatz.HARD_IC:
        return model.initial_value
    return np.zeros(model.equations)


def _trial(model: ScnfModel, t: np.ndarray, nets: _NetTerms):
    P, dP = basis(model.ansatz, model.order, t, model.t0)
    u = _offset(model)[:, None] + np.sum(nets.N * P, axis=1)
    ud = np.sum(nets.Nd * P + nets.N * dP, axis=1)
    return u, ud, P, dP


def _shape_like_t(values: np.ndarray, t) -> np.ndarray:
    return values[:, 0] if np.ndim(t) == 0 else values


def trial_value(model: ScnfModel, t) -> np.ndarray:
    """Trial solution, shape ``(o,)`` for scalar ``t`` or ``(o, n)``."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    u, _, _, _ = _trial(model, tt, _net_terms(model.weights, tt))
    return _shape_like_t(u, t)


def trial_dt(model: ScnfModel, t) -> np.ndarray:
    """Exact time derivative of :func:`trial_value` (product rule)."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    _, ud, _, _ = _trial(model, tt, _net_terms(model.weights, tt))
    return _shape_like_t(ud, t)


class Evaluation(NamedTuple):
    value: np.ndarray
    derivative: np.ndarray
    extrapolated: np.ndarray


def evaluate(model: ScnfModel, t) -> Evaluation:
    """Value and derivative at arbitrary points, flagging points outside
    the subdomain the model was trained on."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    u, ud, _, _ = _trial(model, tt, _net_terms(model.weights, tt))
    return Evaluation(u, ud, model.is_extrapolating(tt))


@dataclass
class IvpResidualContext:
    """Per-point trial values, derivatives, residuals and residual partials."""

    points: np.ndarray
    u: np.ndarray          # (o, n)
    u_dot: np.ndarray      # (o, n)
    residual: np.ndarray   # (o, n)
    d_du: np.ndarray       # (o, o, n): dG_q / du_r
    d_dudot: np.ndarray    # (o, o, n): dG_q / dudot_r
    extra: dict = field(default_factory=dict)


def _check_dims(model: ScnfModel, problem) -> None:
    if problem.dimension != model.equations:
        raise ValueError(
            f"problem {problem.name!r} has {problem.dimension} equations, model has {model.equations}"
        )


def residual_context(model: ScnfModel, problem, points) -> IvpResidualContext:
    _check_dims(model, problem)
    t = np.atleast_1d(np.asarray(points, dtype=float))
    if t.size == 0:
        raise ValueError("points must be nonempty")
    nets = _net_terms(model.weights, t)
    u, ud, P, dP = _trial(model, t, nets)
    G, Gu, Gv = problem.terms(t, u, ud, problem.constants)
    return IvpResidualContext(t, u, ud, G, Gu, Gv, {"nets": nets, "P": P, "dP": dP})


def _ic_residual(model: ScnfModel) -> np.ndarray:
    t0 = np.array([model.t0])
    return _net_terms(model.weights[:, :1], t0).N[:, 0, 0] - model.initial_value


def _finite_or_inf(x: float) -> float:
    return x if math.isfinite(x) else math.inf


def cost(model: ScnfModel, problem, points) -> float:
    """Mean squared residual ``1/(2(n+1)) sum_i sum_q G_q^2``.

    The learned-initial-condition ansatz adds ``0.5 sum_q (N_q1(t0) - u0_q)^2``.
    Non-finite values (diverged weights) are reported as ``inf``.
    """
    with np.errstate(all="ignore"):
        ctx = residual_context(model, problem, points)
        total = math.fsum((ctx.residual * ctx.residual).ravel()) / (2.0 * ctx.points.size)
        if model.ansatz is Ansatz.LEARNED_IC:
            r = _ic_residual(model)
            total += 0.5 * math.fsum(r * r)
    return _finite_or_inf(total)


def cost_and_gradient(model: ScnfModel, problem, points):
    """Cost and its gradient over all ``o*m*(3H+1)`` weights (flat,
    canonical order), averaged over the given points."""
    with np.errstate(all="ignore"):
        ctx = residual_context(model, problem, points)
        G = ctx.residual
        n = ctx.points.size
        nets, P, dP = ctx.extra["nets"], ctx.extra["P"], ctx.extra["dP"]
        # adjoint weights on u_r and udot_r
        a = np.einsum("qi,qri->ri", G, ctx.d_du) / n
        b = np.einsum("qi,qri->ri", G, ctx.d_dudot) / n
        cN = (a[:, None, :] * P + b[:, None, :] * dP)[:, :, None, :]   # (o, m, 1, n)
        cD = (b[:, None, :] * P)[:, :, None, :]

        w = model.weights
        H = model.hidden_count
        nu = w[..., :H, None]
        rho = w[..., 2 * H : 3 * H, None]
        t = ctx.points
        s, s1 = nets.s, nets.s1
        s2 = s1 * (1.0 - 2.0 * s)

        grad = np.empty_like(w)
        dN_eta = rho * s1
        dNd_eta = rho * s2 * nu
        grad[..., :H] = np.sum(cN * dN_eta * t + cD * (dNd_eta * t + rho * s1), axis=-1)
        grad[..., H : 2 * H] = np.sum(cN * dN_eta + cD * dNd_eta, axis=-1)
        grad[..., 2 * H : 3 * H] = np.sum(cN * s + cD * s1 * nu, axis=-1)
        grad[..., 3 * H] = np.sum(cN[:, :, 0, :], axis=-1)

        value = math.fsum((G * G).ravel()) / (2.0 * n)
        if model.ansatz is Ansatz.LEARNED_IC:
            r = _ic_residual(model)
            value += 0.5 * math.fsum(r * r)
            for q in range(model.equations):
                grad[q, 0] += r[q] * grad_value_weights(DenseNet1H(w[q, 0]), model.t0)
    return _finite_or_inf(value), grad.reshape(-1)


def cost_gradient(model: ScnfModel, problem, points) -> np.ndarray:
    return cost_and_gradient(model, problem, points)[1]
