"""Benchmark initial value problems and a fixed-step RK4 reference integrator.

A problem is given in residual form ``G(t, u, u') = 0`` together with the
analytic partials ``dG/du`` and ``dG/du'`` that the cost gradient needs.
Residual functions follow the kernel signature::

    terms(t, u, u_dot, c) -> (G, dG_du, dG_dudot)

with ``t`` of shape ``(n,)``, ``u`` and ``u_dot`` of shape ``(o, n)`` and
``c`` a float array of problem constants. Returned arrays have shapes
``(o, n)``, ``(o, o, n)`` and ``(o, o, n)``. The built-in problems compile
these with numba so training can run in a fused loop; any plain numpy
callable with the same signature also works (slower).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Callable

import numba
import numpy as np

NUMPY_MATH = SimpleNamespace(sin=np.sin, cos=np.cos, exp=np.exp, atan=np.arctan)


@dataclass(frozen=True, eq=False)
class IvpProblem:
    name: str
    dimension: int
    t_start: float
    t_end: float
    u0: np.ndarray
    terms: Callable
    rhs: Callable
    constants: np.ndarray = field(default_factory=lambda: np.zeros(0))
    closed_form: Callable | None = None
    description: str = ""
    sigma: float = 1e-5
    increments: int = 5
    desk_t_end: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "u0", np.atleast_1d(np.asarray(self.u0, dtype=float)))
        object.__setattr__(self, "constants", np.asarray(self.constants, dtype=float))
        if self.u0.shape != (self.dimension,):
            raise ValueError("u0 must have one entry per equation")
        if not self.t_start < self.t_end:
            raise ValueError(f"empty domain [{self.t_start}, {self.t_end}]")

    @property
    def has_solution(self) -> bool:
        return self.closed_form is not None

    def solution(self, t) -> np.ndarray:
        """Analytical solution, shape ``(o,)`` for scalar ``t`` else ``(o, n)``."""
        if self.closed_form is None:
            raise ValueError(f"problem {self.name!r} has no analytical solution")
        tt = np.asarray(t, dtype=float)
        values = np.asarray(self.closed_form(tt, self.constants, NUMPY_MATH), dtype=float)
        return values.reshape((self.dimension,) + tt.shape)

    def residual(self, t, u, u_dot) -> np.ndarray:
        """``G`` at points ``t`` for states of shape ``(o, n)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        u = np.asarray(u, dtype=float).reshape(self.dimension, t.size)
        u_dot = np.asarray(u_dot, dtype=float).reshape(self.dimension, t.size)
        return self.terms(t, u, u_dot, self.constants)[0]

    def f(self, t: float, u: np.ndarray) -> np.ndarray:
        """Explicit right-hand side ``u' = f(t, u)``."""
        return np.asarray(self.rhs(float(t), np.asarray(u, dtype=float), self.constants), dtype=float)

    def with_domain(self, t_start: float | None = None, t_end: float | None = None) -> "IvpProblem":
        """Copy restricted to another time window. The initial value is
        kept, so ``t_start`` may only be changed for autonomous checks."""
        from dataclasses import replace

        return replace(
            self,
            t_start=self.t_start if t_start is None else float(t_start),
            t_end=self.t_end if t_end is None else float(t_end),
        )


# -- residual kernels -------------------------------------------------------


@numba.njit(cache=True)
def _terms_forced_decay(t, u, ud, c):
    # u' + u - t sin(10 t) = 0
    n = t.shape[0]
    G = np.empty((1, n))
    Gu = np.ones((1, 1, n))
    Gv = np.ones((1, 1, n))
    for i in range(n):
        G[0, i] = ud[0, i] + u[0, i] - t[i] * math.sin(10.0 * t[i])
    return G, Gu, Gv


@numba.njit(cache=True)
def _terms_variable_coeff(t, u, ud, c):
    # u' + (1 + e^t cos(t)/1000)/(1+t^2) + 2t/(1+t^2) u = 0
    n = t.shape[0]
    G = np.empty((1, n))
    Gu = np.empty((1, 1, n))
    Gv = np.ones((1, 1, n))
    for i in range(n):
        ti = t[i]
        den = 1.0 + ti * ti
        G[0, i] = ud[0, i] + (1.0 + math.exp(ti) * math.cos(ti) / 1000.0) / den + 2.0 * ti / den * u[0, i]
        Gu[0, 0, i] = 2.0 * ti / den
    return G, Gu, Gv


@numba.njit(cache=True)
def _terms_nonlinear(t, u, ud, c):
    # u' / cos^2(u) / cos^2(2t) - 2 = 0
    n = t.shape[0]
    G = np.empty((1, n))
    Gu = np.empty((1, 1, n))
    Gv = np.empty((1, 1, n))
    for i in range(n):
        cu = math.cos(u[0, i])
        c2t = math.cos(2.0 * t[i])
        k = 1.0 / (cu * cu * c2t * c2t)
        G[0, i] = ud[0, i] * k - 2.0
        Gv[0, 0, i] = k
        Gu[0, 0, i] = ud[0, i] * k * 2.0 * math.tan(u[0, i])
    return G, Gu, Gv


@numba.njit(cache=True)
def _terms_lotka_volterra(t, u, ud, c):
    # tau' - A tau + B tau kappa = 0 ; kappa' + C kappa - D tau kappa = 0
    A, B, C, D = c[0], c[1], c[2], c[3]
    n = t.shape[0]
    G = np.empty((2, n))
    Gu = np.empty((2, 2, n))
    Gv = np.zeros((2, 2, n))
    for i in range(n):
        tau = u[0, i]
        kap = u[1, i]
        G[0, i] = ud[0, i] - A * tau + B * tau * kap
        G[1, i] = ud[1, i] + C * kap - D * tau * kap
        Gu[0, 0, i] = -A + B * kap
        Gu[0, 1, i] = B * tau
        Gu[1, 0, i] = -D * kap
        Gu[1, 1, i] = C - D * tau
        Gv[0, 0, i] = 1.0
        Gv[1, 1, i] = 1.0
    return G, Gu, Gv


@numba.njit(cache=True)
def _terms_constant(t, u, ud, c):
    # u' = 0
    n = t.shape[0]
    G = np.empty((1, n))
    for i in range(n):
        G[0, i] = ud[0, i]
    return G, np.zeros((1, 1, n)), np.ones((1, 1, n))


@numba.njit(cache=True)
def _terms_decay(t, u, ud, c):
    # u' + u = 0
    n = t.shape[0]
    G = np.empty((1, n))
    for i in range(n):
        G[0, i] = ud[0, i] + u[0, i]
    return G, np.ones((1, 1, n)), np.ones((1, 1, n))


# -- explicit right-hand sides ---------------------------------------------


def _rhs_forced_decay(t, u, c):
    return np.array([t * math.sin(10.0 * t) - u[0]])


def _rhs_variable_coeff(t, u, c):
    den = 1.0 + t * t
    return np.array([-(1.0 + math.exp(t) * math.cos(t) / 1000.0) / den - 2.0 * t / den * u[0]])


def _rhs_nonlinear(t, u, c):
    return np.array([2.0 * math.cos(u[0]) ** 2 * math.cos(2.0 * t) ** 2])


def _rhs_lotka_volterra(t, u, c):
    A, B, C, D = c
    tau, kap = u
    return np.array([A * tau - B * tau * kap, -C * kap + D * tau * kap])


def _rhs_constant(t, u, c):
    return np.zeros(1)


def _rhs_decay(t, u, c):
    return -np.asarray(u, dtype=float)


# -- closed forms ----------------------------------------------------------
# Written against a math namespace so the same formula can be evaluated in
# float64 (numpy) or in extended precision (mpmath).


def _sol_forced_decay(t, c, m):
    mpf = getattr(m, "mpf", float)
    return (
        m.sin(10 * t) * (mpf(99) / 10201 + t / 101)
        + m.cos(10 * t) * (mpf(20) / 10201 - 10 * t / 101)
        - mpf(10221) / 10201 * m.exp(-t)
    )


def _sol_variable_coeff(t, c, m):
    mpf = getattr(m, "mpf", float)
    et = m.exp(t)
    return (-t - et * m.cos(t) / 2000 - et * m.sin(t) / 2000 + mpf(10001) / 2000) / (1 + t * t)


def _sol_nonlinear(t, c, m):
    return m.atan(m.sin(4 * t) / 4 + t + 1)


def _sol_constant(t, c, m):
    return c[0] + 0 * t


def _sol_decay(t, c, m):
    return c[0] * m.exp(-t)


# -- registry --------------------------------------------------------------


def _ivp1(**_):
    return IvpProblem(
        name="ivp1",
        dimension=1,
        t_start=0.0,
        t_end=15.0,
        u0=[-1.0],
        terms=_terms_forced_decay,
        rhs=_rhs_forced_decay,
        closed_form=_sol_forced_decay,
        description="u' - t sin(10t) + u = 0, u(0) = -1 (constant coefficients)",
        sigma=1e-5,
        increments=5,
        desk_t_end=5.0,
    )


def _ivp2(**_):
    return IvpProblem(
        name="ivp2",
        dimension=1,
        t_start=0.0,
        t_end=25.0,
        u0=[5.0],
        terms=_terms_variable_coeff,
        rhs=_rhs_variable_coeff,
        closed_form=_sol_variable_coeff,
        description="u' + (1 + e^t cos(t)/1000)/(1+t^2) + 2t/(1+t^2) u = 0, u(0) = 5 (non-constant coefficients)",
        sigma=1e-4,
        increments=5,
        desk_t_end=5.0,
    )


def _ivp3(**_):
    return IvpProblem(
        name="ivp3",
        dimension=1,
        t_start=0.0,
        t_end=20.0,
        u0=[math.pi / 4],
        terms=_terms_nonlinear,
        rhs=_rhs_nonlinear,
        closed_form=_sol_nonlinear,
        description="u'/cos^2(u)/cos^2(2t) - 2 = 0, u(0) = pi/4 (non-linear)",
        sigma=1e0,
        increments=2,
        desk_t_end=5.0,
    )


def _ivp4(A=1.5, B=1.0, C=3.0, D=1.0, tau0=3.0, kappa0=5.0):
    params = dict(A=A, B=B, C=C, D=D, tau0=tau0, kappa0=kappa0)
    return IvpProblem(
        name="ivp4",
        dimension=2,
        t_start=0.0,
        t_end=30.0,
        u0=[tau0, kappa0],
        terms=_terms_lotka_volterra,
        rhs=_rhs_lotka_volterra,
        constants=np.array([A, B, C, D]),
        description=f"Lotka-Volterra, A={A}, B={B}, C={C}, D={D}, tau(0)={tau0}, kappa(0)={kappa0}",
        sigma=1e-3,
        increments=5,
        desk_t_end=5.0,
        params=params,
    )


def _example10(**_):
    return IvpProblem(
        name="example10",
        dimension=1,
        t_start=0.0,
        t_end=1.0,
        u0=[-1.0],
        terms=_terms_forced_decay,
        rhs=_rhs_forced_decay,
        closed_form=_sol_forced_decay,
        description="worked optimisation example u' = t sin(10t) - u, u(0) = -1",
        sigma=1e-5,
        increments=5,
        desk_t_end=1.0,
    )


def constant_problem(u0: float = 1.0, t_end: float = 1.0) -> IvpProblem:
    """``u' = 0``; the trial solution can represent it exactly."""
    return IvpProblem(
        name="constant", dimension=1, t_start=0.0, t_end=t_end, u0=[u0],
        terms=_terms_constant, rhs=_rhs_constant, constants=np.array([u0]),
        closed_form=_sol_constant, description="u' = 0", params=dict(u0=u0, t_end=t_end),
    )


def decay_problem(u0: float = 1.0, t_end: float = 1.0) -> IvpProblem:
    """``u' = -u``."""
    return IvpProblem(
        name="decay", dimension=1, t_start=0.0, t_end=t_end, u0=[u0],
        terms=_terms_decay, rhs=_rhs_decay, constants=np.array([u0]),
        closed_form=_sol_decay, description="u' + u = 0", params=dict(u0=u0, t_end=t_end),
    )


_REGISTRY = {
    "ivp1": _ivp1,
    "ivp2": _ivp2,
    "ivp3": _ivp3,
    "ivp4": _ivp4,
    "example10": _example10,
    "constant": constant_problem,
    "decay": decay_problem,
}

BENCHMARKS = ("ivp1", "ivp2", "ivp3", "ivp4", "example10")


def problem_names() -> list[str]:
    return list(_REGISTRY)


def get_problem(name: str, **params) -> IvpProblem:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {', '.join(_REGISTRY)}") from None
    return factory(**params)


def registry() -> list[IvpProblem]:
    """The benchmark problems with their default parameters."""
    return [get_problem(name) for name in BENCHMARKS]


# -- reference integration -------------------------------------------------


def rk4_solve(problem: IvpProblem, n_steps: int, t_start=None, t_end=None, u0=None):
    """Classic fixed-step fourth order Runge-Kutta.

    Returns ``(times, values)`` with ``values`` of shape ``(n_steps+1, o)``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    a = problem.t_start if t_start is None else float(t_start)
    b = problem.t_end if t_end is None else float(t_end)
    h = (b - a) / n_steps
    times = a + h * np.arange(n_steps + 1)
    times[-1] = b
    values = np.empty((n_steps + 1, problem.dimension))
    y = np.array(problem.u0 if u0 is None else u0, dtype=float)
    values[0] = y
    f = problem.f
    for i in range(n_steps):
        t = times[i]
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        values[i + 1] = y
    return times, values


def rk4_reference(problem: IvpProblem, n_steps: int = 1000):
    """Piecewise linear interpolant of an RK4 trajectory, ``t -> (o, n)``."""
    times, values = rk4_solve(problem, n_steps)

    def reference(t):
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        return np.stack([np.interp(tt, times, values[:, q]) for q in range(problem.dimension)])

    return reference


# -- consistency checks ----------------------------------------------------


def closed_form_residuals(problem: IvpProblem, points, eps: float = 1e-6, dps: int = 40) -> np.ndarray:
    """``|G(t, u(t), u_fd(t))|`` for the analytical solution, with ``u_fd`` a
    central difference of step ``eps``.

    The closed form and its difference quotient are evaluated in ``dps``
    digit arithmetic and rounded to float64 before the (float64) residual is
    applied; in plain float64 the difference quotient alone loses ~1e-5 to
    cancellation where the solution is large.
    """
    import mpmath

    if problem.closed_form is None:
        raise ValueError(f"problem {problem.name!r} has no analytical solution")
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    u = np.empty((problem.dimension, pts.size))
    ud = np.empty_like(u)
    with mpmath.workdps(dps):
        h = mpmath.mpf(eps)
        c = [mpmath.mpf(float(x)) for x in problem.constants]
        for i, t in enumerate(pts):
            tm = mpmath.mpf(float(t))
            val = problem.closed_form(tm, c, mpmath)
            up = problem.closed_form(tm + h, c, mpmath)
            dn = problem.closed_form(tm - h, c, mpmath)
            u[:, i] = float(val)
            ud[:, i] = float((up - dn) / (2 * h))
    return np.abs(problem.terms(pts, u, ud, problem.constants)[0])
