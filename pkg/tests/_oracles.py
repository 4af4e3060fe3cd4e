"""Independent reference computations shared by the test modules."""
import numpy as np

from andre import scnf
from andre.nf_net import weight_count
from andre.refinement import pieces_from_report
from andre.scnf import Ansatz, ScnfModel


def random_model(rng, o, m, H, ansatz=Ansatz.HARD_IC, t0=0.0, width=1.0, scale=0.5, u0=None):
    weights = rng.uniform(-scale, scale, (o, m, weight_count(H)))
    if u0 is None:
        u0 = rng.uniform(0.5, 2.0, o)
    return ScnfModel(weights, np.asarray(u0, dtype=float), t0, ansatz, t0 + width)


def fd_gradient(model, problem, points, eps=1e-6):
    """Central differences of ``scnf.cost`` on every weight, in flat order."""
    flat = model.weights.reshape(-1)
    out = np.empty(flat.size)
    for i in range(flat.size):
        plus, minus = model.copy(), model.copy()
        plus.weights.reshape(-1)[i] += eps
        minus.weights.reshape(-1)[i] -= eps
        out[i] = (scnf.cost(plus, problem, points) - scnf.cost(minus, problem, points)) / (2 * eps)
    return out


def normwise_rel_err(approx, exact):
    """``max|approx - exact| / max|exact|``."""
    approx, exact = np.asarray(approx), np.asarray(exact)
    return float(np.max(np.abs(approx - exact)) / max(np.max(np.abs(exact)), 1e-300))


def sig(z):
    return 1.0 / (1.0 + np.exp(-z))


def check_completed_run(report, problem, config):
    """Invariants every completed run must satisfy."""
    assert report.completed
    b = report.boundaries
    assert b[0] == problem.t_start and b[-1] == problem.t_end
    assert all(y > x for x, y in zip(b, b[1:]))
    assert [(r.t_left, r.t_right) for r in report.subdomains] == list(zip(b, b[1:]))
    assert all(r.e_vp <= config.sigma for r in report.subdomains)
    # parameters are back at their base values on entry to every later subdomain
    for prev, cur in zip(report.attempts, report.attempts[1:]):
        if cur.subdomain != prev.subdomain:
            assert prev.action == "accept"
            assert cur.attempt == 1
            assert cur.alpha == config.lr_ladder[0]
            assert cur.hidden_count == config.hidden_count
    # the right boundary of an active subdomain only moves left
    for prev, cur in zip(report.attempts, report.attempts[1:]):
        if cur.subdomain == prev.subdomain:
            assert cur.t_left == prev.t_left
            assert cur.t_right <= prev.t_right
    assert all(a.t_right - a.t_left >= config.delta * config.min_subdomain_size * (1 - 1e-12) for a in report.attempts)
    # exact handoff under the hard-constrained ansatz
    models = pieces_from_report(report)
    for left, right in zip(models, models[1:]):
        assert np.array_equal(scnf.trial_value(left, left.t_right), right.initial_value)
        assert np.array_equal(scnf.trial_value(right, right.t0), right.initial_value)
