"""Convergence traces as CSV, and the seeded experiment runner."""
from __future__ import annotations

import dataclasses
import io
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from ..solvers import NumericalError, SolverConfig, SolverResult, solve
from .specs import RunSpec, build, reference_value

HEADER = ("seed", "epoch", "inner_step", "exact_grads", "stochastic_grads",
          "lmo_calls", "projections", "wall_time_s", "objective")
COST_COLUMNS = ("exact_grads", "stochastic_grads", "lmo_calls", "projections", "wall_time_s")
STEP_GRID = (0.01, 0.1, 1.0, 10.0)

Row = Tuple[int, int, int, int, int, int, int, float, float]


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return "%.12g" % v


@dataclasses.dataclass
class TraceFile:
    """Rows of a convergence trace plus metadata (solver, reference ``f*``, tuned rate).

    The CSV holds the rows; the metadata goes to a JSON sidecar
    ``<path>.json`` so the CSV keeps its fixed schema.
    """

    rows: List[Row] = dataclasses.field(default_factory=list)
    meta: Dict[str, object] = dataclasses.field(default_factory=dict)

    @classmethod
    def from_results(cls, results: Sequence[Tuple[int, SolverResult]], wall_time=False,
                     meta=None) -> "TraceFile":
        rows: List[Row] = []
        for seed, res in sorted(results, key=lambda p: p[0]):
            for p in res.trace:
                c = p.ledger
                rows.append((int(seed), int(p.epoch), int(p.inner_step), int(c.exact_gradients),
                             int(c.stochastic_gradients), int(c.lmo_calls), int(c.projections),
                             float(c.wall_time) if wall_time else 0.0, float(p.objective)))
        return cls(rows, dict(meta or {}))

    def seeds(self) -> List[int]:
        return sorted({r[0] for r in self.rows})

    def column(self, name: str, seed: Optional[int] = None) -> List[float]:
        j = HEADER.index(name)
        return [r[j] for r in self.rows if seed is None or r[0] == seed]

    def final_objectives(self) -> Dict[int, float]:
        out: Dict[int, float] = {}
        for r in self.rows:
            out[r[0]] = r[-1]
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(HEADER) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, meta=None) -> "TraceFile":
        lines = text.splitlines()
        if not lines or tuple(lines[0].split(",")) != HEADER:
            raise ValueError("trace CSV header does not match the expected schema")
        rows = []
        for ln in lines[1:]:
            if not ln:
                continue
            f = ln.split(",")
            rows.append(tuple(int(x) for x in f[:7]) + (float(f[7]), float(f[8])))
        return cls(rows, dict(meta or {}))

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())
        with open(str(path) + ".json", "w", encoding="utf-8") as fh:
            json.dump(self.meta, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path) -> "TraceFile":
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        meta = {}
        side = str(path) + ".json"
        if os.path.exists(side):
            with open(side, encoding="utf-8") as fh:
                meta = json.load(fh)
        return cls.from_csv(text, meta)


def _one(args):
    problem, domain, solver, cfg = args
    obj, dom = build(problem, domain)
    return solve(solver, obj, dom, cfg)


def _run_seeds(spec: RunSpec, cfg: SolverConfig, obj, dom, jobs: int):
    cfgs = [dataclasses.replace(cfg, seed=s) for s in spec.seeds]
    if jobs > 1 and len(cfgs) > 1:
        # workers rebuild the (deterministic) problem from its spec strings
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            res = list(pool.map(_one, [(spec.problem, spec.domain, spec.solver, c) for c in cfgs]))
    else:
        res = [solve(spec.solver, obj, dom, c) for c in cfgs]
    return list(zip(spec.seeds, res))


def _mean(xs):
    return math.fsum(xs) / len(xs)


def tune_step(spec: RunSpec, obj, dom, grid=STEP_GRID, jobs: int = 1) -> Tuple[float, Dict[str, float]]:
    """Pick the SGD/SVRG rate constant with the lowest mean final objective."""
    scores = {}
    for c in grid:
        cfg = dataclasses.replace(spec.config, step=c)
        try:
            results = _run_seeds(spec, cfg, obj, dom, jobs)
            scores[repr(c)] = _mean([r.trace[-1].objective for _, r in results])
        except NumericalError:
            scores[repr(c)] = math.inf
    best = min(grid, key=lambda c: (scores[repr(c)], c))
    return best, scores


def run(spec: RunSpec, jobs: int = 1, objective=None) -> Tuple[TraceFile, str]:
    """Run every seed of ``spec``; returns the trace and a one-line summary.

    When ``spec.out`` is set the CSV and its sidecar are written there.
    """
    if objective is None:
        obj, dom = build(spec.problem, spec.domain)
    else:
        obj, dom = objective
    spec.validate(dom)
    cfg = spec.config
    meta: Dict[str, object] = {"solver": spec.solver, "problem": spec.problem,
                               "domain": spec.domain, "mode": cfg.mode, "seeds": list(spec.seeds)}
    if cfg.case is not None:
        meta["case"] = cfg.case
    if spec.tune and spec.solver in ("sgd", "svrg"):
        best, scores = tune_step(spec, obj, dom, jobs=jobs)
        cfg = dataclasses.replace(cfg, step=best)
        meta["step_grid"] = scores
    if spec.solver in ("sgd", "svrg"):
        meta["step"] = cfg.step
    fstar = reference_value(obj)
    if fstar is not None:
        meta["f_star"] = fstar
    results = _run_seeds(spec, cfg, obj, dom, jobs)
    trace = TraceFile.from_results(results, spec.record_wall_time, meta)
    finals = [r.trace[-1].objective for _, r in results]
    std = statistics.pstdev(finals) if len(finals) > 1 else 0.0
    summary = "%s: final objective %.6g ± %.2g over %d seed%s" % (
        spec.solver, _mean(finals), std, len(finals), "" if len(finals) == 1 else "s")
    not_conv = sum(r.not_converged for _, r in results)
    if not_conv:
        summary += f" ({not_conv} subsolves hit their iteration cap)"
    if spec.out:
        trace.write(spec.out)
    return trace, summary


def reference_run(obj, dom, lmo_budget: int = 10 ** 6, eval_every: int = 1000) -> float:
    """``f*`` estimate from a long deterministic Frank-Wolfe run."""
    res = solve("fw", obj, dom, SolverConfig(iterations=int(lmo_budget), eval_every=eval_every))
    return min(res.objectives())
