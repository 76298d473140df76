"""Empirical rate fits: cost to reach accuracy ``eps`` versus ``1/eps``."""
from __future__ import annotations

import dataclasses
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .trace import COST_COLUMNS, TraceFile


@dataclasses.dataclass
class RateFit:
    """Result of :func:`rate_fit`.

    ``points`` pairs each target with its cost (``None`` when unreached).
    For ``kind="power"`` the fit is ``log cost = slope * log(1/eps) + b``;
    for ``kind="log"`` it is ``cost = slope * log(1/eps) + b``.
    """

    kind: str
    column: str
    points: List[Tuple[float, Optional[float]]]
    slope: float
    intercept: float
    r2: float

    @property
    def unreached(self) -> List[float]:
        return [e for e, c in self.points if c is None]

    def format(self) -> str:
        lines = [f"{'eps':>10}  {self.column}"]
        for e, c in self.points:
            lines.append(f"{e:>10.3g}  " + ("unreached" if c is None else "%.12g" % c))
        what = "log-log slope" if self.kind == "power" else "slope vs log(1/eps)"
        lines.append(f"{what} = {self.slope:.4f}, R^2 = {self.r2:.4f}")
        return "\n".join(lines)


def first_hits(costs: Sequence[float], objectives: Sequence[float], f_star: float,
               eps: Sequence[float]) -> List[Optional[float]]:
    """First cumulative cost at which ``objective - f_star <= e``, per target."""
    sub = np.asarray(objectives, dtype=float) - f_star
    costs = np.asarray(costs, dtype=float)
    out: List[Optional[float]] = []
    for e in eps:
        idx = np.flatnonzero(sub <= e)
        out.append(float(costs[idx[0]]) if idx.size else None)
    return out


def fit_line(x, y) -> Tuple[float, float, float]:
    """Least-squares ``y = a x + b``; returns ``(a, b, R^2)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        return math.nan, math.nan, math.nan
    a, b = np.polyfit(x, y, 1)
    resid = y - (a * x + b)
    tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / tot if tot > 0 else 1.0
    return float(a), float(b), r2


def rate_fit(trace: TraceFile, cost_column: str, eps: Sequence[float],
             f_star: Optional[float] = None, kind: str = "power") -> RateFit:
    """Cost-to-accuracy points and their fitted rate.

    The first-hit cost is averaged over the seeds in the trace; a target
    that any seed misses is reported as unreached and left out of the fit.
    ``f_star`` defaults to the reference value stored in the trace metadata.
    """
    if cost_column not in COST_COLUMNS:
        raise ValueError(f"unknown cost column {cost_column!r}; choose from {COST_COLUMNS}")
    if kind not in ("power", "log"):
        raise ValueError("kind must be 'power' or 'log'")
    if f_star is None:
        f_star = trace.meta.get("f_star")
        if f_star is None:
            raise ValueError("no reference f* given and none stored with the trace")
    eps = [float(e) for e in eps]
    if any(e <= 0 for e in eps):
        raise ValueError("target accuracies must be positive")
    per_seed = []
    for s in trace.seeds():
        per_seed.append(first_hits(trace.column(cost_column, s), trace.column("objective", s),
                                   float(f_star), eps))
    points: List[Tuple[float, Optional[float]]] = []
    for j, e in enumerate(eps):
        hits = [h[j] for h in per_seed]
        c = None if any(h is None for h in hits) or not hits else math.fsum(hits) / len(hits)
        points.append((e, c))
    xs = [math.log(1.0 / e) for e, c in points if c is not None]
    cs = [c for e, c in points if c is not None]
    if kind == "power":
        if any(c <= 0 for c in cs):
            raise ValueError("a log-log fit needs positive costs")
        ys = [math.log(c) for c in cs]
    else:
        ys = cs
    a, b, r2 = fit_line(xs, ys)
    return RateFit(kind, cost_column, points, a, b, r2)
