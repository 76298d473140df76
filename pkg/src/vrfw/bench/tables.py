"""Plain-text tables of the theory schedules."""
from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence

from .. import schedules as sch
from .specs import SpecError


def _num(v) -> str:
    if isinstance(v, int):
        return str(v)
    return "%.12g" % v


def _table(title: str, header: Sequence[str], rows: List[Sequence]) -> str:
    cells = [list(header)] + [[_num(v) for v in r] for r in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(header))]
    out = [title]
    for r in cells:
        out.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(out)


def _need(params: Dict[str, float], *names) -> List[float]:
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise SpecError(f"schedule needs parameter(s) {', '.join(missing)}")
    return [params[n] for n in names]


def schedule_table(solver: str, params: Optional[Dict[str, float]] = None,
                   t_max: int = 3, k_max: int = 5) -> str:
    """Epoch lengths, step sizes, batch sizes and tolerances of ``solver``.

    ``params`` supplies the constants a schedule depends on: ``L``, ``D``,
    ``G``, ``mu``, ``case`` (STORC), ``N`` (SCGS) and ``c`` (SGD/SVRG).
    """
    p = dict(params or {})
    if t_max < 1 or k_max < 1:
        raise SpecError("t_max and k_max must be positive")
    ks = range(1, k_max + 1)
    if solver == "fw":
        return _table("fw", ["k", "gamma_k"], [(k, sch.fw_step(k)) for k in ks])
    if solver == "svrf":
        mult = p.get("mult", 96.0)
        a = _table("svrf epochs", ["t", "N_t"],
                   [(t, sch.svrf_epoch_length(t)) for t in range(1, t_max + 1)])
        b = _table("svrf steps (k restarts every epoch)", ["k", "gamma_k", "m_k"],
                   [(k, sch.fw_step(k), sch.svrf_batch_theory(k, mult)) for k in ks])
        return a + "\n\n" + b
    if solver == "sfw":
        L, D, G = _need(p, "L", "D", "G")
        return _table("sfw", ["k", "gamma_k", "m_k"],
                      [(k, sch.fw_step(k), sch.sfw_batch_theory(k, G, L, D)) for k in ks])
    if solver == "scgs":
        L, D, G, N = _need(p, "L", "D", "G", "N")
        N = int(N)
        return _table(f"scgs (N = {N})", ["k", "gamma_k", "beta_k", "eta_k", "m_k"],
                      [(k, sch.fw_step(k), sch.sliding_beta(k, L), sch.sliding_eta(k, L, D * D, N),
                        sch.scgs_batch_theory(k, G, L, D, N)) for k in ks])
    if solver == "storc":
        case = p.get("case")
        if case not in ("a", "b", "c"):
            raise SpecError("storc schedule needs case a, b or c")
        L, D = _need(p, "L", "D")
        if case == "b":
            _need(p, "G")
        if case == "c":
            _need(p, "mu")
        epochs = [sch.storc_epoch(t, case, L, D, p.get("G"), p.get("mu"))
                  for t in range(1, t_max + 1)]
        a = _table(f"storc case ({case}) epochs", ["t", "N_t", "D_t^2"],
                   [(e.t, e.N, e.Dt2) for e in epochs])
        rows = []
        for e in epochs:
            for k in range(1, min(k_max, e.N) + 1):
                rows.append((e.t, k, sch.fw_step(k), e.beta(k), e.eta(k), e.batch(k)))
        b = _table(f"storc case ({case}) steps", ["t", "k", "gamma_k", "beta_k", "eta_tk", "m_tk"], rows)
        return a + "\n\n" + b
    if solver in ("sgd", "svrg"):
        c = p.get("c", 1.0)
        if solver == "sgd":
            rows = [(k, c / math.sqrt(k), 100) for k in ks]
        else:
            rows = [(k, c, 100) for k in ks]
        return _table(solver, ["k", "rate_k", "m_k"], rows)
    raise SpecError(f"unknown solver {solver!r}")
