import math
import pickle

import numpy as np
import pytest

from andre.problems import (
    closed_form_residuals,
    decay_problem,
    get_problem,
    problem_names,
    registry,
    rk4_reference,
    rk4_solve,
)

NAMES = ["ivp1", "ivp2", "ivp3", "ivp4", "example10"]
WITH_SOLUTION = ["ivp1", "ivp2", "ivp3", "example10"]


def sample_states(problem, rng, n=100):
    t = rng.uniform(problem.t_start, problem.t_end, n)
    if problem.name == "ivp4":
        u = rng.uniform(0.1, 6.0, (2, n))
    elif problem.name == "ivp3":
        u = rng.uniform(-1.3, 1.3, (1, n))  # away from cos(u) = 0
    else:
        u = rng.uniform(-5, 5, (problem.dimension, n))
    ud = rng.uniform(-5, 5, (problem.dimension, n))
    return t, u, ud


def test_registry_contents():
    assert [p.name for p in registry()] == NAMES
    for name in NAMES:
        assert name in problem_names()
    lv = get_problem("ivp4")
    assert lv.dimension == 2 and lv.u0.tolist() == [3.0, 5.0]
    assert (lv.t_start, lv.t_end) == (0.0, 30.0)
    assert get_problem("ivp4", kappa0=1.0).u0.tolist() == [3.0, 1.0]
    assert (get_problem("ivp1").t_end, get_problem("ivp2").t_end, get_problem("ivp3").t_end) == (15.0, 25.0, 20.0)


def test_unknown_problem_lists_available():
    with pytest.raises(KeyError, match="ivp1"):
        get_problem("ivp9")


def test_closed_form_at_start():
    assert get_problem("ivp1").solution(0.0)[0] == pytest.approx(-1.0, abs=1e-15)
    assert get_problem("ivp3").solution(0.0)[0] == pytest.approx(math.pi / 4, abs=1e-15)
    for name in WITH_SOLUTION:
        p = get_problem(name)
        assert abs(p.solution(p.t_start)[0] - p.u0[0]) <= 1e-12


def test_lotka_volterra_residual_example():
    p = get_problem("ivp4")
    G = p.residual([0.7], np.array([[3.0], [1.0]]), np.array([[0.0], [0.0]]))
    # tau' - (1.5*3 - 1*3*1) with tau' = 0
    assert G[0, 0] == pytest.approx(-1.5, abs=1e-15)


def test_no_closed_form_for_lotka_volterra():
    p = get_problem("ivp4")
    assert not p.has_solution
    with pytest.raises(ValueError):
        p.solution(1.0)


@pytest.mark.parametrize("name", WITH_SOLUTION)
def test_closed_form_satisfies_residual(name):
    p = get_problem(name)
    pts = np.random.default_rng(0).uniform(p.t_start, p.t_end, 100)
    assert np.max(closed_form_residuals(p, pts)) < 1e-6


def fd4(fn, x, eps):
    # fourth-order central difference; G can be ~1e5 (ivp2 near t=25), so a
    # wider stencil keeps rounding noise well below the tolerance
    return (8 * (fn(x + eps) - fn(x - eps)) - (fn(x + 2 * eps) - fn(x - 2 * eps))) / (12 * eps)


@pytest.mark.parametrize("name", NAMES + ["constant", "decay"])
def test_partials_match_fd(name):
    p = get_problem(name)
    t, u, ud = sample_states(p, np.random.default_rng(1))
    _, Gu, Gv = p.terms(t, u, ud, p.constants)
    for r in range(p.dimension):
        e = np.zeros_like(u)
        e[r] = 1.0

        def along_u(s):
            return p.terms(t, u + s * e, ud, p.constants)[0]

        def along_ud(s):
            return p.terms(t, u, ud + s * e, p.constants)[0]

        assert np.allclose(Gu[:, r, :], fd4(along_u, 0.0, 1e-3), rtol=1e-6, atol=1e-12)
        assert np.allclose(Gv[:, r, :], fd4(along_ud, 0.0, 1e-3), rtol=1e-6, atol=1e-12)


@pytest.mark.parametrize("name", NAMES)
def test_rhs_consistent_with_residual(name):
    p = get_problem(name)
    t, u, _ = sample_states(p, np.random.default_rng(2))
    ud = np.stack([p.f(ti, u[:, i]) for i, ti in enumerate(t)], axis=1)
    G = p.residual(t, u, ud)
    assert np.max(np.abs(G)) < 1e-9 * max(1.0, np.max(np.abs(ud)))


def test_problems_pickle():
    for p in registry():
        q = pickle.loads(pickle.dumps(p))
        assert q.name == p.name and np.array_equal(q.u0, p.u0)


def test_with_domain():
    p = get_problem("ivp3").with_domain(t_end=5.0)
    assert (p.t_start, p.t_end) == (0.0, 5.0)
    with pytest.raises(ValueError):
        get_problem("ivp3").with_domain(t_end=0.0)


# -- RK4 -------------------------------------------------------------------


def rk4_stability_endpoint(h, n):
    # classic RK4 applied to u' = -u multiplies by R(-h) every step
    z = -h
    return (1 + z + z * z / 2 + z**3 / 6 + z**4 / 24) ** n


def test_rk4_matches_stability_polynomial():
    _, v = rk4_solve(decay_problem(), 10)
    assert v[-1, 0] == pytest.approx(rk4_stability_endpoint(0.1, 10), rel=1e-14)


def test_rk4_decay_endpoint_example():
    _, v = rk4_solve(decay_problem(), 10)
    assert abs(v[-1, 0] - math.exp(-1)) < 1e-8


def test_rk4_convergence_order():
    errs = [abs(rk4_solve(decay_problem(), n)[1][-1, 0] - math.exp(-1)) for n in (10, 20, 40)]
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert all(abs(o - 4.0) <= 0.1 for o in orders)


def test_rk4_ivp1_against_closed_form():
    p = get_problem("ivp1")
    t, v = rk4_solve(p, 10_000)
    assert np.max(np.abs(v[:, 0] - p.solution(t)[0])) < 1e-8


def test_rk4_shapes_and_errors():
    t, v = rk4_solve(get_problem("ivp4").with_domain(t_end=0.7), 7)
    assert t.shape == (8,) and v.shape == (8, 2)
    assert t[0] == 0.0 and t[-1] == 0.7
    with pytest.raises(ValueError):
        rk4_solve(decay_problem(), 0)


def test_rk4_reference_interpolates():
    p = get_problem("ivp4").with_domain(t_end=5.0)
    ref = rk4_reference(p, 500)
    t, v = rk4_solve(p, 500)
    assert np.array_equal(ref(t), v.T)
    out = ref(np.array([0.0, 1.234]))
    assert out.shape == (2, 2) and np.all(out > 0)
