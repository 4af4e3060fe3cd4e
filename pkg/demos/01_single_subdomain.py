"""Train one subdomain of the worked example u' = t sin(10t) - u, u(0) = -1.

A zero-initialised trial solution of order 5 is fitted on [0, 0.5] with
full-batch Adam and five incremental-learning stages, then compared with
the closed-form solution.
"""
import os

import numpy as np

from andre import scnf
from andre.optimizer import TrainConfig, train
from andre.problems import get_problem
from andre.scnf import ScnfModel, make_grid

EPOCHS = int(os.environ.get("DEMO_EPOCHS", "100000"))

problem = get_problem("example10")
grid = make_grid(0.0, 0.5)
model = ScnfModel.zeros(order=5, hidden_count=5, initial_value=problem.u0, t0=0.0, t_right=0.5)

result = train(model, problem, grid, TrainConfig(epochs=EPOCHS, increments=5))

# each stage adds two more training points
for stage in result.history:
    print(f"{stage['points']:2d} points, {stage['epochs']} epochs: cost {stage['cost_first']:.3e} -> {stage['cost_last']:.3e}")
print(f"E_TP = {result.e_tp:.3e}")

t = np.linspace(0.0, 0.5, 6)
approx = scnf.trial_value(result.model, t)[0]
exact = problem.solution(t)[0]
for ti, a, e in zip(t, approx, exact):
    print(f"t={ti:.2f}  trial={a:+.8f}  exact={e:+.8f}  |err|={abs(a - e):.1e}")
