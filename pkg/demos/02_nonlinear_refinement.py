"""Adaptive refinement on the nonlinear problem on [0, 5].

sigma = 1 and delta = 0.5 with two incremental stages. The attempt log shows
every split, reduction and parameter adjustment the state machine made.
"""
import os

import numpy as np

from andre.optimizer import TrainConfig
from andre.problems import get_problem
from andre.refinement import AndreConfig, evaluate_solution, run

EPOCHS = int(os.environ.get("DEMO_EPOCHS", "100000"))

problem = get_problem("ivp3").with_domain(t_end=5.0)
config = AndreConfig(sigma=1.0, delta=0.5, train=TrainConfig(epochs=EPOCHS, increments=2))
report = run(problem, config)

print("attempts:")
for a in report.attempts:
    print(f"  D{a.subdomain} [{a.t_left:.5f}, {a.t_right:.5f}] H={a.hidden_count:2d} alpha={a.alpha:<6g} "
          f"E_VP={a.e_vp:.3e} -> {a.action}")

print("\naccepted subdomains:")
for r in report.subdomains:
    print(f"  D{r.index} [{r.t_left:.5f}, {r.t_right:.5f}] E_TP={r.e_tp:.2e} E_VP={r.e_vp:.2e} l1={r.l1:.2e}")
agg = report.aggregates
print(f"\nh = {agg['h']}, mean l1 = {agg['l1']:.3e}, mean linf = {agg['linf']:.3e}, {agg['wall_time_s']:.1f} s")

# the stitched solution can be evaluated anywhere in the domain
t = np.linspace(0, 5, 11)
err = np.abs(evaluate_solution(report, t)[0] - problem.solution(t)[0])
print("max abs error on a uniform grid:", f"{err.max():.3e}")
