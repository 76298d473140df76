"""Projection-free (FW, SFW, SVRF, SCGS, STORC) and projected (SGD, SVRG) solvers.

Every solver starts from the vertex ``argmin_w <grad f(x), w>`` for a fixed
feasible ``x`` (``init_w0``), records a trace of oracle costs against the
objective, and returns a :class:`SolverResult`.
"""
from __future__ import annotations

import dataclasses
import math
import time
from typing import Callable, List, Optional, Union

import numpy as np

from . import schedules as sch
from .core import (CostLedger, FeasibleDomain, FiniteSumObjective, RngStream,
                   convex_combination, dot, norm)
from .estimator import minibatch_plain, minibatch_vr, take_snapshot


class NumericalError(RuntimeError):
    """Objective became non-finite during a run."""


BatchRule = Union[None, int, Callable[[int], int]]


@dataclasses.dataclass
class SolverConfig:
    mode: str = "practical"            # "theory" or "practical"
    epochs: int = 4                    # T, outer loops of SVRF / STORC / SVRG
    iterations: int = 100              # K for FW, SFW, SCGS, SGD
    seed: int = 0
    eval_every: int = 1
    batch: BatchRule = None            # overrides the mode's batch schedule
    batch_size: int = 100              # fixed batch of STORC (practical), SGD, SVRG
    snapshot_gap: int = 50
    epoch_length: Optional[int] = None  # overrides N_t
    step: float = 1.0                  # c for SGD, c' for SVRG
    case: Optional[str] = None         # STORC theory case
    reset_k: Optional[bool] = None     # SVRF; default True in theory mode
    svrf_mult: float = 96.0
    storc_mult_a: float = 900.0
    storc_mult_b: float = 700.0
    storc_mult_b_lin: float = 24.0
    storc_mult_c: float = 5600.0
    eta_scale: float = 1.0
    eta: Optional[float] = None        # fixed subsolve tolerance
    subsolve_cap: float = 10.0
    L: Optional[float] = None
    D: Optional[float] = None
    G: Optional[float] = None
    alpha: Optional[float] = None
    budget: Optional[float] = None     # stop once stochastic + n * exact exceeds this
    target: Optional[float] = None     # stop once a recorded objective is <= this
    x0: Optional[np.ndarray] = None    # the arbitrary feasible start point
    record_iterates: bool = False

    def __post_init__(self):
        if self.mode not in ("theory", "practical"):
            raise ValueError("mode must be 'theory' or 'practical'")
        for name in ("epochs", "iterations", "eval_every", "batch_size", "snapshot_gap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def theory(self) -> bool:
        return self.mode == "theory"


@dataclasses.dataclass
class TracePoint:
    ledger: CostLedger
    objective: float
    epoch: int
    inner_step: int
    iterate: Optional[np.ndarray] = None


@dataclasses.dataclass
class SubsolveResult:
    x: np.ndarray
    gap: float
    iterations: int
    converged: bool
    eta: float = 0.0


@dataclasses.dataclass
class SolverResult:
    solver: str
    x: np.ndarray
    trace: List[TracePoint]
    ledger: CostLedger
    subsolves: List[SubsolveResult] = dataclasses.field(default_factory=list)
    final_gap: Optional[float] = None
    extras: dict = dataclasses.field(default_factory=dict)

    @property
    def not_converged(self) -> int:
        return sum(not s.converged for s in self.subsolves)

    def objectives(self) -> np.ndarray:
        return np.array([p.objective for p in self.trace])

    def costs(self, column: str) -> np.ndarray:
        return np.array([getattr(p.ledger, column) for p in self.trace])


class _Run:
    """Per-run state: ledger, RNG, trace and stopping rule."""

    def __init__(self, name, obj, domain, cfg: SolverConfig):
        self.name = name
        self.obj = obj
        self.domain = domain
        self.cfg = cfg
        self.ledger = CostLedger()
        self.rng = RngStream(cfg.seed)
        self.trace: List[TracePoint] = []
        self.steps = 0
        self._t0 = time.perf_counter()
        self._last = None
        self.reached = False

    def record(self, x, epoch, k, force=False):
        if not force and self.steps % self.cfg.eval_every:
            return
        key = (epoch, k)
        if key == self._last:
            return
        self._last = key
        self.ledger.wall_time = time.perf_counter() - self._t0
        val = self.obj.value(x)
        if not math.isfinite(val):
            raise NumericalError(f"{self.name}: objective is {val} at epoch {epoch}, step {k}")
        it = np.array(x, copy=True) if self.cfg.record_iterates else None
        self.trace.append(TracePoint(self.ledger.copy(), val, epoch, k, it))
        if self.cfg.target is not None and val <= self.cfg.target:
            self.reached = True

    def step_done(self, x, epoch, k):
        self.steps += 1
        self.record(x, epoch, k)

    def exhausted(self) -> bool:
        if self.reached:
            return True
        b = self.cfg.budget
        return b is not None and self.ledger.gradient_equivalents(self.obj.n) >= b

    def result(self, x, **kw):
        self.ledger.wall_time = time.perf_counter() - self._t0
        return SolverResult(self.name, x, self.trace, self.ledger, **kw)

    def constants(self, need_G=False, need_alpha=False, mean_L=False):
        # mean_L: the smoothness of f itself, for steps that never size a batch
        if self.cfg.L is not None:
            L = self.cfg.L
        else:
            L = self.obj.mean_smoothness_bound() if mean_L else self.obj.smoothness_bound()
        D = self.cfg.D if self.cfg.D is not None else self.domain.diameter()
        G = self.cfg.G if self.cfg.G is not None else self.obj.lipschitz_bound()
        alpha = self.cfg.alpha if self.cfg.alpha is not None else self.obj.strong_convexity()
        if need_G and G is None:
            raise ValueError(f"{self.name} theory schedule needs a Lipschitz bound G")
        if need_alpha and not alpha:
            raise ValueError(f"{self.name} needs a strong convexity constant alpha > 0")
        return L, D, G, alpha


def _batch(rule: BatchRule, k: int, default: Callable[[int], int]) -> int:
    if rule is None:
        return default(k)
    if callable(rule):
        return int(rule(k))
    return int(rule)


def init_w0(obj: FiniteSumObjective, domain: FeasibleDomain, x=None,
            ledger: Optional[CostLedger] = None, rng: Optional[RngStream] = None):
    """``argmin_{w in domain} <grad f(x), w>`` for a feasible ``x``."""
    x = domain.default_point() if x is None else np.asarray(x, dtype=float)
    g = obj.full_gradient(x)
    v = domain.lmo(g, rng)
    if ledger is not None:
        ledger.exact_gradients += 1
        ledger.lmo_calls += 1
    return v


def _start(run: _Run):
    w = init_w0(run.obj, run.domain, run.cfg.x0, run.ledger, run.rng)
    run.record(w, 0, 0, force=True)
    return w


def _final_gap(obj, domain, x, rng=None):
    g = obj.full_gradient(x)
    return dot(g, x - domain.lmo(g, rng))


def frank_wolfe(obj, domain, K: Optional[int] = None, config: Optional[SolverConfig] = None):
    """Deterministic Frank-Wolfe with ``gamma_k = 2/(k+1)``.

    ``K`` counts iterations including the first, which is the shared
    initialization (a full step, ``gamma = 1``, from the arbitrary point),
    so a run costs exactly ``K`` exact gradients and ``K`` LMO calls.
    """
    cfg = config or SolverConfig()
    K = cfg.iterations if K is None else K
    if K < 1:
        raise ValueError("K must be >= 1")
    run = _Run("fw", obj, domain, cfg)
    w = _start(run)
    k = 0
    for k in range(1, K):
        g = obj.full_gradient(w)
        run.ledger.exact_gradients += 1
        v = domain.lmo(g, run.rng)
        run.ledger.lmo_calls += 1
        w = convex_combination(w, v, sch.fw_step(k))
        run.step_done(w, 1, k)
        if run.exhausted():
            break
    run.record(w, 1, k, force=True)
    return run.result(w, final_gap=_final_gap(obj, domain, w))


def sfw(obj, domain, config: Optional[SolverConfig] = None):
    """Stochastic Frank-Wolfe: FW with a plain mini-batch gradient.

    Theory mode uses ``m_k = ceil((G (k+1) / (L D))^2)``; practical mode
    ``m_k = k^2``.  ``config.iterations`` counts iterations as in
    :func:`frank_wolfe`.
    """
    cfg = config or SolverConfig()
    run = _Run("sfw", obj, domain, cfg)
    if cfg.theory and cfg.batch is None:
        L, D, G, _ = run.constants(need_G=True)
        default = lambda k: sch.sfw_batch_theory(k, G, L, D)
    else:
        default = sch.sfw_batch_practical
    batches = []
    w = _start(run)
    for k in range(1, cfg.iterations):
        m = _batch(cfg.batch, k, default)
        batches.append(m)
        g = minibatch_plain(obj, w, m, run.rng, run.ledger)
        v = domain.lmo(g, run.rng)
        run.ledger.lmo_calls += 1
        w = convex_combination(w, v, sch.fw_step(k))
        run.step_done(w, 1, k)
        if run.exhausted():
            break
    run.record(w, 1, len(batches), force=True)
    return run.result(w, extras={"batches": batches})


def svrf(obj, domain, config: Optional[SolverConfig] = None):
    """Stochastic variance-reduced Frank-Wolfe.

    Theory mode: epoch ``t`` has ``N_t = 2^(t+3) - 2`` steps with batch
    ``96 (k+1)``, and ``k`` restarts at 1 after every snapshot.  Practical
    mode: a snapshot every ``snapshot_gap`` steps, batch ``k``, and ``k``
    keeps increasing across snapshots.
    """
    cfg = config or SolverConfig()
    run = _Run("svrf", obj, domain, cfg)
    reset = cfg.theory if cfg.reset_k is None else cfg.reset_k
    if cfg.theory:
        default = lambda k: sch.svrf_batch_theory(k, cfg.svrf_mult)
        length = sch.svrf_epoch_length
    else:
        default = sch.svrf_batch_practical
        length = lambda t: cfg.snapshot_gap
    if cfg.epoch_length is not None:
        length = lambda t: cfg.epoch_length
    w = _start(run)
    k_global = 0
    epoch_ends = []
    stop = False
    for t in range(1, cfg.epochs + 1):
        snap = take_snapshot(obj, w, run.ledger)
        x = w
        for j in range(1, length(t) + 1):
            k = j if reset else k_global + j
            m = _batch(cfg.batch, k, default)
            g = minibatch_vr(obj, x, snap, m, run.rng, run.ledger)
            v = domain.lmo(g, run.rng)
            run.ledger.lmo_calls += 1
            x = convex_combination(x, v, sch.fw_step(k))
            run.step_done(x, t, j)
            if run.exhausted():
                stop = True
                break
        k_global += j
        w = x
        run.record(w, t, j, force=True)
        epoch_ends.append(len(run.trace) - 1)
        if stop:
            break
    return run.result(w, extras={"epoch_ends": epoch_ends})


def fw_subsolve(gradient_estimate, beta, x_prev, domain: FeasibleDomain, eta,
                max_iters: Optional[int] = None, rng: Optional[RngStream] = None,
                ledger: Optional[CostLedger] = None) -> SubsolveResult:
    """Frank-Wolfe on ``g(x) = beta/2 ||x - x_prev||^2 + <gradient_estimate, x>``.

    Starts at ``x_prev`` and stops at the first iterate whose duality gap is
    at most ``eta``.  Steps use exact line search on the quadratic.  Each
    iteration is one LMO call.  If ``max_iters`` (default
    ``10 ceil(beta D^2 / eta)``) runs out, the iterate with the smallest gap
    seen is returned with ``converged=False``.
    """
    if beta <= 0 or eta <= 0:
        raise ValueError("beta and eta must be positive")
    if max_iters is None:
        max_iters = 10 * int(math.ceil(beta * domain.diameter() ** 2 / eta))
    max_iters = max(1, int(max_iters))
    x = np.array(x_prev, dtype=float, copy=True)
    best_x, best_gap = x, math.inf
    for it in range(1, max_iters + 1):
        grad = beta * (x - x_prev) + gradient_estimate
        v = domain.lmo(grad, rng)
        d = v - x
        gap = -dot(grad, d)
        if gap < best_gap:
            best_x, best_gap = x, gap
        if gap <= eta:
            if ledger is not None:
                ledger.lmo_calls += it
            return SubsolveResult(x, gap, it, True, eta)
        dd = dot(d, d)
        gamma = min(1.0, gap / (beta * dd)) if dd > 0 else 0.0
        x = x + gamma * d
    if ledger is not None:
        ledger.lmo_calls += max_iters
    return SubsolveResult(best_x, best_gap, max_iters, False, eta)


def _sliding_epoch(run: _Run, y0, N, t, batch, beta, eta, estimate, subsolves, zs=None):
    """One pass of the accelerated sliding loop; returns ``y_N``."""
    x = y = y0
    for k in range(1, N + 1):
        gamma = sch.fw_step(k)
        z = convex_combination(y, x, gamma)
        if zs is not None:
            zs.append(z)
        g = estimate(z, batch(k))
        res = fw_subsolve(g, beta(k), x, run.domain, eta(k), rng=run.rng, ledger=run.ledger,
                          max_iters=int(math.ceil(run.cfg.subsolve_cap
                                                  * beta(k) * run.domain.diameter() ** 2
                                                  / eta(k))))
        subsolves.append(res)
        x = res.x
        y = convex_combination(y, x, gamma)
        run.step_done(y, t, k)
        if run.exhausted():
            return y, k, True
    return y, N, False


def _eta_rule(cfg, base):
    if cfg.eta is not None:
        return lambda k: cfg.eta
    return lambda k: cfg.eta_scale * base(k)


def scgs(obj, domain, config: Optional[SolverConfig] = None):
    """Stochastic conditional gradient sliding: one sliding pass of ``iterations`` steps.

    ``gamma_k = 2/(k+1)``, ``beta_k = 3L/k``, ``eta_k = 2 L D^2 / (N k)``.
    Practical batch ``k^3``; theory batch ``ceil(G^2 N (k+1)^2 / (L D)^2)``.
    Practical mode takes ``L`` from :meth:`mean_smoothness_bound`.
    """
    cfg = config or SolverConfig()
    run = _Run("scgs", obj, domain, cfg)
    L, D, G, _ = run.constants(need_G=cfg.theory and cfg.batch is None, mean_L=not cfg.theory)
    N = cfg.iterations if cfg.epoch_length is None else cfg.epoch_length
    if cfg.theory:
        default = lambda k: sch.scgs_batch_theory(k, G, L, D, N)
    else:
        default = sch.scgs_batch_practical
    zs = [] if cfg.record_iterates else None
    subsolves: List[SubsolveResult] = []
    w = _start(run)
    y, k, _ = _sliding_epoch(
        run, w, N, 1,
        batch=lambda k: _batch(cfg.batch, k, default),
        beta=lambda k: sch.sliding_beta(k, L),
        eta=_eta_rule(cfg, lambda k: sch.sliding_eta(k, L, D * D, N)),
        estimate=lambda z, m: minibatch_plain(obj, z, m, run.rng, run.ledger),
        subsolves=subsolves, zs=zs)
    run.record(y, 1, k, force=True)
    return run.result(y, subsolves=subsolves, extras={"z": zs} if zs is not None else {})


def storc(obj, domain, config: Optional[SolverConfig] = None, case: Optional[str] = None):
    """Stochastic variance-reduced conditional gradient sliding.

    Each epoch snapshots ``y_0 = w_{t-1}`` and runs ``N_t`` sliding steps
    on variance-reduced gradients at ``z_k``.  Theory mode takes its
    schedule from ``case`` (``'a'``: interior optimum, ``'b'``: Lipschitz
    ``f``, ``'c'``: strongly convex ``f``); practical mode uses
    ``N_t = snapshot_gap``, batch ``batch_size``, ``D_t^2 = D^2 / 2^(t-1)``
    (the tolerance follows the per-epoch halving of the error bound) and
    ``L`` from :meth:`mean_smoothness_bound`.
    """
    cfg = config or SolverConfig()
    case = case if case is not None else cfg.case
    run = _Run("storc", obj, domain, cfg)
    if cfg.theory:
        if case not in ("a", "b", "c"):
            raise ValueError("theory-mode STORC needs case 'a', 'b' or 'c'")
        L, D, G, alpha = run.constants(need_G=case == "b", need_alpha=case == "c")
        mu = L / alpha if alpha else None
        mults = dict(mult_a=cfg.storc_mult_a, mult_b=cfg.storc_mult_b,
                     mult_b_lin=cfg.storc_mult_b_lin, mult_c=cfg.storc_mult_c)
        epoch_params = lambda t: sch.storc_epoch(t, case, L, D, G, mu, **mults)
    else:
        L, D, G, _ = run.constants(mean_L=True)
        gap_len = cfg.snapshot_gap if cfg.epoch_length is None else cfg.epoch_length
        epoch_params = lambda t: sch.storc_practical_epoch(t, gap_len, L, D, G)
    zs = [] if cfg.record_iterates else None
    subsolves: List[SubsolveResult] = []
    w = _start(run)
    epoch_ends = []
    for t in range(1, cfg.epochs + 1):
        p = epoch_params(t)
        N = p.N if cfg.epoch_length is None else cfg.epoch_length
        if cfg.theory:
            default = p.batch
        else:
            default = lambda k: cfg.batch_size
        snap = take_snapshot(obj, w, run.ledger)
        eta_base = (lambda p, N: lambda k: sch.sliding_eta(k, p.L, p.Dt2, N))(p, N)
        w, k, stop = _sliding_epoch(
            run, w, N, t,
            batch=lambda k: _batch(cfg.batch, k, default),
            beta=lambda k: sch.sliding_beta(k, L),
            eta=_eta_rule(cfg, eta_base),
            estimate=lambda z, m: minibatch_vr(obj, z, snap, m, run.rng, run.ledger),
            subsolves=subsolves, zs=zs)
        run.record(w, t, k, force=True)
        epoch_ends.append(len(run.trace) - 1)
        if stop:
            break
    extras = {"epoch_ends": epoch_ends}
    if zs is not None:
        extras["z"] = zs
    return run.result(w, subsolves=subsolves, extras=extras)


def _need_projection(domain, name):
    if not domain.can_project:
        raise ValueError(f"{name} needs a domain with a projection, got {domain!r}")


def sgd(obj, domain, config: Optional[SolverConfig] = None):
    """Projected SGD, ``w_k = P(w_{k-1} - (c / sqrt k) g_k)``, fixed batch."""
    cfg = config or SolverConfig()
    _need_projection(domain, "sgd")
    run = _Run("sgd", obj, domain, cfg)
    w = _start(run)
    k = 0
    for k in range(1, cfg.iterations + 1):
        m = _batch(cfg.batch, k, lambda k: cfg.batch_size)
        g = minibatch_plain(obj, w, m, run.rng, run.ledger)
        w = domain.project(w - (cfg.step / math.sqrt(k)) * g)
        run.ledger.projections += 1
        run.step_done(w, 1, k)
        if run.exhausted():
            break
    run.record(w, 1, k, force=True)
    return run.result(w)


def svrg(obj, domain, config: Optional[SolverConfig] = None):
    """Projected SVRG: constant rate ``c'``, snapshot every ``snapshot_gap`` steps."""
    cfg = config or SolverConfig()
    _need_projection(domain, "svrg")
    run = _Run("svrg", obj, domain, cfg)
    w = _start(run)
    gap_len = cfg.snapshot_gap if cfg.epoch_length is None else cfg.epoch_length
    stop = False
    for t in range(1, cfg.epochs + 1):
        snap = take_snapshot(obj, w, run.ledger)
        for j in range(1, gap_len + 1):
            m = _batch(cfg.batch, j, lambda k: cfg.batch_size)
            g = minibatch_vr(obj, w, snap, m, run.rng, run.ledger)
            w = domain.project(w - cfg.step * g)
            run.ledger.projections += 1
            run.step_done(w, t, j)
            if run.exhausted():
                stop = True
                break
        run.record(w, t, j, force=True)
        if stop:
            break
    return run.result(w)


SOLVERS = {
    "fw": lambda obj, dom, cfg: frank_wolfe(obj, dom, config=cfg),
    "sfw": sfw,
    "svrf": svrf,
    "scgs": scgs,
    "storc": storc,
    "sgd": sgd,
    "svrg": svrg,
}

PROJECTION_FREE = ("fw", "sfw", "svrf", "scgs", "storc")


def solve(name: str, obj, domain, config: Optional[SolverConfig] = None) -> SolverResult:
    try:
        fn = SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown solver {name!r}; choose from {sorted(SOLVERS)}") from None
    return fn(obj, domain, config or SolverConfig())
