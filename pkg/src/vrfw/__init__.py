"""Projection-free stochastic optimization: Frank-Wolfe with variance reduction.

The top-level namespace re-exports the pieces most scripts need; the
submodules hold the rest.
"""
from ._kernels import BACKEND
from .core import CostLedger, FeasibleDomain, FiniteSumObjective, RngStream
from .oracles import L1Ball, L2Ball, Simplex, TraceNormBall, duality_gap, lmo_trace_norm
from .problems import MulticlassLogistic, QuadraticProblem, quadratic_make
from .solvers import (SOLVERS, NumericalError, SolverConfig, SolverResult, frank_wolfe, scgs,
                      sfw, sgd, solve, storc, svrf, svrg)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CostLedger", "FeasibleDomain", "FiniteSumObjective", "RngStream",
    "L1Ball", "L2Ball", "Simplex", "TraceNormBall", "duality_gap", "lmo_trace_norm",
    "MulticlassLogistic", "QuadraticProblem", "quadratic_make",
    "SOLVERS", "NumericalError", "SolverConfig", "SolverResult", "frank_wolfe", "scgs", "sfw",
    "sgd", "solve", "storc", "svrf", "svrg",
]
