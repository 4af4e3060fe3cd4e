"""Adaptive neural domain refinement (ANDRe) for initial value problems.

Small collocation neural forms are trained per subdomain; subdomains are
split or shrunk until a verification error bound holds everywhere.
"""
from .metrics import RunReport, aggregate, subdomain_errors
from .optimizer import TrainConfig, train
from .problems import IvpProblem, get_problem, registry, rk4_solve
from .refinement import AndreConfig, run
from .scnf import Ansatz, ScnfModel, make_grid

__all__ = [
    "AndreConfig",
    "Ansatz",
    "IvpProblem",
    "RunReport",
    "ScnfModel",
    "TrainConfig",
    "aggregate",
    "get_problem",
    "make_grid",
    "registry",
    "rk4_solve",
    "run",
    "subdomain_errors",
    "train",
]

__version__ = "0.1.0"
