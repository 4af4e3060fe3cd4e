"""Single-hidden-layer sigmoid network N(t) with analytic weight gradients.

Weights are stored flat in the canonical order ``(nu, eta, rho, gamma)``::

    N(t)    = sum_j rho_j * sig(nu_j * t + eta_j) + gamma
    dN/dt   = sum_j rho_j * sig'(z_j) * nu_j

The same ordering is used for gradients and for Adam moment vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def sigmoid(z):
    """Logistic function, overflow-free for large ``|z|``.

    Accepts a scalar or an array.
    """
    if np.ndim(z) == 0:
        z = float(z)
        if z >= 0.0:
            return 1.0 / (1.0 + math.exp(-z))
        e = math.exp(z)
        return e / (1.0 + e)
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))


def weight_count(hidden_count: int) -> int:
    return 3 * hidden_count + 1


@dataclass
class DenseNet1H:
    """One input, ``H`` sigmoid hidden neurons, one linear output.

    ``weights`` is the flat vector of length ``3H+1``; the named
    attributes are views into it, so updating ``weights`` in place
    updates the network.
    """

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or (self.weights.size - 1) % 3 != 0 or self.weights.size < 4:
            raise ValueError(f"weight vector of length {self.weights.size} is not 3H+1 for H >= 1")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("network weights must be finite")

    @classmethod
    def zeros(cls, hidden_count: int) -> "DenseNet1H":
        if hidden_count < 1:
            raise ValueError("hidden_count must be positive")
        return cls(np.zeros(weight_count(hidden_count)))

    @classmethod
    def from_parts(cls, nu, eta, rho, gamma) -> "DenseNet1H":
        nu, eta, rho = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (nu, eta, rho))
        if not (nu.shape == eta.shape == rho.shape):
            raise ValueError("nu, eta and rho must have equal length")
        return cls(np.concatenate([nu, eta, rho, [float(gamma)]]))

    @property
    def hidden_count(self) -> int:
        return (self.weights.size - 1) // 3

    @property
    def nu(self):
        return self.weights[: self.hidden_count]

    @property
    def eta(self):
        h = self.hidden_count
        return self.weights[h : 2 * h]

    @property
    def rho(self):
        h = self.hidden_count
        return self.weights[2 * h : 3 * h]

    @property
    def gamma(self) -> float:
        return float(self.weights[-1])

    def copy(self) -> "DenseNet1H":
        return DenseNet1H(self.weights.copy())


def _activations(net: DenseNet1H, t):
    # hidden-neuron axis first, time points last
    t = np.asarray(t, dtype=float)
    z = np.multiply.outer(net.nu, t) + net.eta.reshape((-1,) + (1,) * t.ndim)
    s = sigmoid(z)
    s1 = s * (1.0 - s)
    return t, s, s1


def _hidden(v, t):
    return v.reshape((-1,) + (1,) * np.ndim(t))


def forward(net: DenseNet1H, t):
    """Network output at scalar or array ``t``."""
    t, s, _ = _activations(net, t)
    return np.tensordot(net.rho, s, axes=1) + net.gamma


def forward_dt(net: DenseNet1H, t):
    """Time derivative of the network output."""
    t, _, s1 = _activations(net, t)
    return np.tensordot(net.rho * net.nu, s1, axes=1)


def grad_value_weights(net: DenseNet1H, t):
    """Gradient of ``forward`` w.r.t. the flat weights.

    Returns shape ``(3H+1,)`` for scalar ``t`` and ``(3H+1, n)`` for
    an array of ``n`` points.
    """
    t, s, s1 = _activations(net, t)
    rho = _hidden(net.rho, t)
    d_eta = rho * s1
    return np.concatenate([d_eta * t, d_eta, s, np.ones((1,) + t.shape)])


def grad_dt_weights(net: DenseNet1H, t):
    """Gradient of ``forward_dt`` w.r.t. the flat weights, same layout."""
    t, s, s1 = _activations(net, t)
    s2 = s1 * (1.0 - 2.0 * s)
    rho = _hidden(net.rho, t)
    nu = _hidden(net.nu, t)
    d_eta = rho * s2 * nu
    d_nu = d_eta * t + rho * s1
    d_rho = s1 * nu
    return np.concatenate([d_nu, d_eta, d_rho, np.zeros((1,) + t.shape)])
