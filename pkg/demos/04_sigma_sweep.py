"""How the verification bound sigma drives the number of subdomains.

ivp2 (non-constant coefficients) on [0, 5]. Tighter bounds can only keep or
raise the subdomain count, and every run keeps its mean E_VP under sigma.
"""
import os

from andre.experiments import sweep
from andre.optimizer import TrainConfig
from andre.problems import get_problem
from andre.refinement import AndreConfig

EPOCHS = int(os.environ.get("DEMO_EPOCHS", "100000"))

problem = get_problem("ivp2").with_domain(t_end=5.0)
config = AndreConfig(sigma=1e-2, train=TrainConfig(epochs=EPOCHS))
rows = sweep(problem, config, "sigma", [1e-1, 1e-2, 1e-3, 1e-4])

print(f"{'sigma':>8} {'h':>3} {'l1':>10} {'mean E_VP':>10} {'mean E_TP':>10}")
for r in rows:
    print(f"{r['value']:8.0e} {r['h']:3d} {r['l1']:10.3e} {r['mean_e_vp']:10.3e} {r['mean_e_tp']:10.3e}")
