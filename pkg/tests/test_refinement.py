import math

import numpy as np
import pytest

from _oracles import check_completed_run
from andre.optimizer import TrainConfig, train
from andre.problems import constant_problem, get_problem
from andre.refinement import (
    AndreConfig,
    NeuronCapExceeded,
    RefinementState,
    adjust_parameters,
    complex_conditions,
    evaluate_solution,
    handoff,
    pieces_from_report,
    reduce_subdomain,
    reset_parameters,
    run,
    split_rightmost,
    verify,
)
from andre.scnf import ScnfModel, make_grid

LADDER = (1e-3, 6e-3, 3.6e-2)


def state(boundaries, l=0, **kw):
    return RefinementState(list(boundaries), np.array([1.0]), l=l, **kw)


# -- boundary operations ---------------------------------------------------


def test_split_examples():
    s = split_rightmost(state([0.0, 10.0]), 0.5)
    assert s.boundaries == [0.0, 5.0, 10.0] and s.h == 2
    assert split_rightmost(state([0.0, 1.0]), 0.9).boundaries == [0.0, 0.9, 1.0]
    s = reduce_subdomain(split_rightmost(state([0.0, 10.0]), 0.5), 0.5)
    assert s.boundaries == [0.0, 2.5, 10.0]


def test_reduce_examples():
    s = reduce_subdomain(state([0.0, 5.0, 10.0]), 0.5)
    assert s.boundaries == [0.0, 2.5, 10.0]
    s = reduce_subdomain(state([1.0, 2.0, 4.0, 8.0], l=1), 0.3)
    assert s.boundaries[0] == 1.0 and s.boundaries[2] == pytest.approx(2.6) and s.boundaries[3] == 8.0


def test_right_boundary_sequence_of_one_subdomain():
    # subdomain starting at 5.5953 on [.., 15]: split, then repeated reductions
    s = state([0.0, 5.5953, 15.0], l=1)
    split_rightmost(s, 0.5)
    rights = [s.t_right]
    for _ in range(5):
        reduce_subdomain(s, 0.5)
        rights.append(s.t_right)
    # published values carry five significant digits
    assert rights == pytest.approx([10.298, 7.9465, 6.7709, 6.1831, 5.8892, 5.7423], rel=5e-5)
    assert s.boundaries[-1] == 15.0 and s.t_left == 5.5953


def test_split_and_reduce_guards():
    with pytest.raises(ValueError):
        split_rightmost(state([0.0, 1.0, 2.0]), 0.5)
    with pytest.raises(ValueError):
        reduce_subdomain(state([0.0, 1.0]), 0.5)


# -- decisions -------------------------------------------------------------


def test_complex_conditions_examples():
    assert complex_conditions(state([0.0, 0.05, 1.0]))
    assert complex_conditions(state([0.0, 2.0, 4.0], prev_e_vp=22.695, e_vp=34.448))
    assert not complex_conditions(state([0.0, 0.5, 4.0], prev_e_vp=34.448, e_vp=9.9730))
    # no earlier attempt on this subdomain
    assert not complex_conditions(state([0.0, 2.0, 4.0], e_vp=5.0))


def test_adjust_parameters_ladder_then_neurons():
    config = AndreConfig(sigma=1e-5)
    s = state([0.0, 1.0, 2.0])
    assert adjust_parameters(s, config) == "alpha->0.006"
    assert (s.rung, s.hidden_count) == (1, 5)
    adjust_parameters(s, config)
    assert config.lr_ladder[s.rung] == 3.6e-2
    assert adjust_parameters(s, config) == "H->7"
    assert (s.rung, s.hidden_count) == (0, 7)


def test_adjust_parameters_neuron_cap():
    config = AndreConfig(sigma=1e-5, neuron_cap=51)
    s = state([0.0, 1.0, 2.0], rung=2, hidden_count=51)
    with pytest.raises(NeuronCapExceeded):
        adjust_parameters(s, config)
    s = state([0.0, 1.0, 2.0], rung=2, hidden_count=49)
    assert adjust_parameters(s, config) == "H->51"


def test_reset_parameters():
    config = AndreConfig(sigma=1e-5)
    s = state([0.0, 1.0, 2.0], rung=2, hidden_count=9, prev_e_vp=1.0, e_vp=2.0, attempts=4)
    reset_parameters(s, config)
    assert (s.rung, s.hidden_count, s.prev_e_vp, s.e_vp, s.attempts) == (0, 5, None, None, 0)


def test_config_validation():
    for bad in (dict(sigma=0.0), dict(sigma=1.0, delta=1.0), dict(sigma=1.0, lr_ladder=(1e-2, 1e-3)),
                dict(sigma=1.0, hidden_count=60)):
        with pytest.raises(ValueError):
            AndreConfig(**bad)
    assert AndreConfig(sigma=1.0).lr_ladder == LADDER


# -- verification and handoff ----------------------------------------------


def test_verify_perfect_fit_and_divergence():
    grid = make_grid(0.0, 1.0)
    assert verify(ScnfModel.zeros(5, 5, [1.0], 0.0), constant_problem(), grid) == 0.0
    blown = ScnfModel.zeros(2, 1, [1.0], 0.0)
    blown.weights[0, 1, -1] = 1e308
    assert verify(blown, get_problem("ivp3"), make_grid(0.0, 1e10)) == math.inf


def test_verification_error_can_exceed_training_error():
    problem = get_problem("ivp2")
    grid = make_grid(0.0, 5.0)
    result = train(ScnfModel.zeros(5, 5, problem.u0, 0.0), problem, grid, TrainConfig(epochs=100))
    assert verify(result.model, problem, grid) > result.e_tp


def test_handoff_is_value_at_boundary():
    model = ScnfModel.zeros(5, 5, [2.5], 0.0)
    assert handoff(model, 1.0).tolist() == [2.5]


# -- full runs -------------------------------------------------------------


def test_trivial_problem_single_subdomain():
    problem = constant_problem()
    config = AndreConfig(sigma=1e-4, train=TrainConfig(epochs=1000))
    report = run(problem, config)
    assert report.completed and report.h == 1
    assert report.boundaries == [0.0, 1.0]
    assert np.all(evaluate_solution(report, np.linspace(0, 1, 21)) == 1.0)
    check_completed_run(report, problem, config)


def test_infinite_sigma_one_attempt():
    problem = get_problem("ivp1").with_domain(t_end=2.0)
    report = run(problem, AndreConfig(sigma=math.inf, train=TrainConfig(epochs=100)))
    assert report.h == 1 and len(report.attempts) == 1


def test_desk_run_invariants(ivp3_short_report, ivp3_desk):
    report = ivp3_short_report
    check_completed_run(report, ivp3_desk, AndreConfig(**{**report.config, "train": TrainConfig()}))
    actions = {a.action.split()[0] for a in report.attempts}
    assert {"accept", "split"} <= actions


def test_abort_at_neuron_cap():
    problem = get_problem("ivp1")
    config = AndreConfig(sigma=1e-12, min_subdomain_size=100, neuron_cap=5, train=TrainConfig(epochs=200))
    report = run(problem, config)
    assert report.status == "aborted" and not report.completed
    assert [a.action for a in report.attempts] == ["split", "adjust alpha->0.006", "adjust alpha->0.036", "abort"]
    assert report.h == 0 and report.boundaries == []
    assert "cap 5" in report.message


def test_lotka_volterra_handoff_positive():
    problem = get_problem("ivp4").with_domain(t_end=1.0)
    config = AndreConfig(sigma=1e-3, train=TrainConfig(epochs=20_000))
    report = run(problem, config)
    check_completed_run(report, problem, config)
    models = pieces_from_report(report)
    for m in models:
        h = handoff(m, m.t_right)
        assert h.shape == (2,) and np.all(np.isfinite(h)) and np.all(h > 0)
    assert report.metrics_info["reference"] == "rk4-1000"
    assert report.aggregates["l1"] < 0.1


def test_warm_start_runs():
    problem = get_problem("ivp3").with_domain(t_end=2.0)
    config = AndreConfig(sigma=1.0, warm_start=True, train=TrainConfig(epochs=5000, increments=2))
    check_completed_run(run(problem, config), problem, config)


def test_learned_ic_run_completes():
    problem = get_problem("ivp1").with_domain(t_end=1.0)
    config = AndreConfig(sigma=1e-3, ansatz="learned", train=TrainConfig(epochs=10_000))
    report = run(problem, config)
    assert report.completed
    assert all(r.e_vp <= 1e-3 for r in report.subdomains)


def test_runs_are_deterministic():
    problem = get_problem("ivp1").with_domain(t_end=2.0)
    config = AndreConfig(sigma=1e-3, train=TrainConfig(epochs=5000))
    a, b = run(problem, config), run(problem, config)
    assert a.boundaries == b.boundaries
    assert [(r.e_tp, r.e_vp, r.l1) for r in a.subdomains] == [(r.e_tp, r.e_vp, r.l1) for r in b.subdomains]
