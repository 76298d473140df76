"""Quick invariant checks run by ``vrfw verify``.

Each check returns ``(name, passed, detail)``.  They are smaller cousins of
the test suite, meant for sanity-checking an installed build.
"""
from __future__ import annotations

import itertools
from typing import Callable, List, Tuple

import numpy as np

from .. import _kernels
from ..core import dot
from ..dataio import synth_multiclass
from ..estimator import exhaustive_vr_variance, take_snapshot
from ..oracles import L1Ball, L2Ball, duality_gap, lmo_trace_norm, project_simplex
from ..problems import MulticlassLogistic, QuadraticProblem, quadratic_make
from ..solvers import SolverConfig, frank_wolfe, svrf

Check = Tuple[str, bool, str]


def check_l1_lmo() -> Check:
    gen = np.random.default_rng(1)
    worst = 0.0
    for d in range(1, 7):
        ball = L1Ball(1.5, d)
        V = ball.vertices()
        for _ in range(20):
            g = gen.standard_normal(d)
            worst = max(worst, dot(g, ball.lmo(g)) - float((V @ g).min()))
    return "l1 lmo = vertex enumeration", worst <= 1e-12, f"max excess {worst:.2e}"


def check_trace_lmo() -> Check:
    gen = np.random.default_rng(2)
    worst = 0.0
    for _ in range(20):
        h, m = gen.integers(1, 30, size=2)
        g = gen.standard_normal((h, m))
        best = -3.0 * np.linalg.svd(g, compute_uv=False)[0]
        got = dot(g, lmo_trace_norm(g, 3.0))
        worst = max(worst, abs(got - best) / abs(best))
    return "trace-norm lmo = dense svd", worst <= 1e-5, f"max rel err {worst:.2e}"


def check_simplex_projection() -> Check:
    gen = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        v = gen.standard_normal(6) * 2
        p = project_simplex(v, 1.0)
        probes = gen.dirichlet(np.ones(6), size=200)
        # first-order optimality: <v - p, q - p> <= 0 for every feasible q
        worst = max(worst, float(((probes - p) @ (v - p)).max()))
    return "simplex projection optimality", worst <= 1e-10, f"max violation {worst:.2e}"


def check_duality_gap() -> Check:
    gen = np.random.default_rng(4)
    ball = L1Ball(1.0, 5)
    V = ball.vertices()
    worst = 0.0
    for _ in range(50):
        g, x = gen.standard_normal(5), ball.project(gen.standard_normal(5))
        ref = float(max((x - v) @ g for v in V))
        worst = max(worst, abs(duality_gap(g, x, ball) - ref))
    return "duality gap = vertex enumeration", worst <= 1e-12, f"max err {worst:.2e}"


def check_logistic_gradient() -> Check:
    obj = MulticlassLogistic(synth_multiclass(30, 8, 5, seed=5))
    gen = np.random.default_rng(5)
    worst = 0.0
    for _ in range(10):
        i = int(gen.integers(obj.n))
        w = gen.standard_normal(obj.shape)
        g = obj.component_gradient(i, w)
        fd = np.zeros_like(w)
        h = 1e-6
        for idx in itertools.product(*map(range, w.shape)):
            e = np.zeros_like(w)
            e[idx] = h
            fd[idx] = (obj.component_value(i, w + e) - obj.component_value(i, w - e)) / (2 * h)
        worst = max(worst, np.linalg.norm(g - fd) / max(1e-12, np.linalg.norm(fd)))
    return "logistic gradient = finite differences", worst <= 1e-5, f"max rel err {worst:.2e}"


def check_variance_bound() -> Check:
    ball = L2Ball(3.0, 10)
    q = quadratic_make(10, 4.0, 1.0, 20, seed=6, domain=ball)
    gen = np.random.default_rng(6)
    worst, at_anchor = -np.inf, 0.0
    for _ in range(20):
        w, w0 = ball.project(gen.standard_normal(10)), ball.project(gen.standard_normal(10))
        snap = take_snapshot(q, w0)
        bound = 6 * q.L * (2 * (q.value(w) - q.f_star) + (q.value(w0) - q.f_star))
        worst = max(worst, exhaustive_vr_variance(q, w, snap) - bound)
        at_anchor = max(at_anchor, exhaustive_vr_variance(q, w0, snap))
    ok = worst <= 0 and at_anchor == 0.0
    return "variance-reduced estimator bound", ok, f"max excess {worst:.2e}, variance at w0 {at_anchor}"


def check_single_component() -> Check:
    gen = np.random.default_rng(7)
    M = gen.standard_normal((4, 4))
    q = QuadraticProblem((M @ M.T + np.eye(4))[None], gen.standard_normal((1, 4)))
    ball = L1Ball(1.0, 4)
    # with k carried across snapshots and unit batches, every estimate is exact
    cfg = SolverConfig(mode="theory", epochs=3, batch=1, reset_k=False, record_iterates=True)
    a = [p.iterate for p in svrf(q, ball, cfg).trace]
    b = [p.iterate for p in frank_wolfe(q, ball, len(a), SolverConfig(record_iterates=True)).trace]
    err = max(float(np.abs(x - y).max()) for x, y in zip(a, b)) if len(a) == len(b) else np.inf
    return "n = 1 svrf matches fw", err <= 1e-12, f"max diff {err:.2e}"


CHECKS: List[Callable[[], Check]] = [
    check_l1_lmo, check_trace_lmo, check_simplex_projection, check_duality_gap,
    check_logistic_gradient, check_variance_bound, check_single_component,
]


def run_checks(out=print) -> bool:
    ok_all = True
    out(f"kernel backend: {_kernels.BACKEND}")
    for fn in CHECKS:
        name, ok, detail = fn()
        ok_all &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    return ok_all
