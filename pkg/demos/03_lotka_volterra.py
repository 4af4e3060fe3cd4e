"""Predator-prey system against a fine RK4 trajectory.

There is no closed form, so the error columns use a 1000-step RK4 solution
interpolated onto the training points. The report and CSV tables are
written to ./lv_out (override with DEMO_OUT).
"""
import os

import numpy as np

from andre.export import export
from andre.optimizer import TrainConfig
from andre.problems import get_problem, rk4_solve
from andre.refinement import AndreConfig, evaluate_solution, run

EPOCHS = int(os.environ.get("DEMO_EPOCHS", "100000"))
OUT = os.environ.get("DEMO_OUT", "lv_out")

problem = get_problem("ivp4", kappa0=5.0).with_domain(t_end=2.0)
report = run(problem, AndreConfig(sigma=1e-3, train=TrainConfig(epochs=EPOCHS)))
print(report.status, "with", report.h, "subdomains; reference:", report.metrics_info["reference"])

times, states = rk4_solve(problem, 1000)
approx = evaluate_solution(report, times[::100])
for t, (tau, kap), (tau_ref, kap_ref) in zip(times[::100], approx.T, states[::100]):
    print(f"t={t:.1f}  prey {tau:8.4f} ({tau_ref:8.4f})  predator {kap:8.4f} ({kap_ref:8.4f})")

print("mean l1 vs RK4:", f"{report.aggregates['l1']:.3e}")
for path in export(report, OUT):
    print("wrote", path)
