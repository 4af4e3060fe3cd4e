"""Hard-constrained versus learned initial condition on ivp1, [0, 1].

With the learned variant the first network has to reproduce the initial
value through a penalty term, so the handoff between subdomains is only
approximately continuous.
"""
import os

import numpy as np

from andre import scnf
from andre.optimizer import TrainConfig
from andre.problems import get_problem
from andre.refinement import AndreConfig, pieces_from_report, run

EPOCHS = int(os.environ.get("DEMO_EPOCHS", "100000"))
problem = get_problem("ivp1").with_domain(t_end=1.0)

for ansatz in ("hard", "learned"):
    report = run(problem, AndreConfig(sigma=1e-5, ansatz=ansatz, train=TrainConfig(epochs=EPOCHS)))
    models = pieces_from_report(report)
    jumps = [float(np.max(np.abs(scnf.trial_value(b, b.t0) - scnf.trial_value(a, a.t_right))))
             for a, b in zip(models, models[1:])]
    agg = report.aggregates
    print(f"{ansatz:8s} h={agg['h']} l1={agg['l1']:.3e} attempts={len(report.attempts)} "
          f"max jump at boundaries={max(jumps, default=0.0):.1e}")
