"""Run specifications: which problem, domain, solver and seeds.

Problems and domains are given as short strings so a run can be described
on the command line and rebuilt inside worker processes:

* ``quadratic:dim=10,n=20,L=4,alpha=1,seed=0,placement=interior``
* ``logistic:path/to/data.txt``
* ``synthetic:n=2000,m=50,h=10,seed=0``

and ``trace_norm:50``, ``l1:1``, ``l2:1`` or ``simplex:1``.
"""
from __future__ import annotations

import dataclasses
from typing import Dict, List, Optional, Tuple

from ..core import FeasibleDomain, FiniteSumObjective
from ..dataio import load, synth_multiclass
from ..oracles import L1Ball, L2Ball, Simplex, TraceNormBall
from ..problems import MulticlassLogistic, QuadraticProblem, quadratic_make
from ..solvers import SOLVERS, SolverConfig

_QUAD_KEYS = {"dim": int, "n": int, "L": float, "alpha": float, "seed": int,
              "placement": str, "noise": float, "spread": float, "diagonal": int}
_SYNTH_KEYS = {"n": int, "m": int, "h": int, "seed": int,
               "separability": float, "density": float}


class SpecError(ValueError):
    """Invalid or inconsistent run specification."""


def _kv(body: str, schema: Dict[str, type]) -> Dict[str, object]:
    out: Dict[str, object] = {}
    if not body:
        return out
    for item in body.split(","):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in schema:
            raise SpecError(f"unknown or malformed option {item!r}; known: {sorted(schema)}")
        try:
            out[key] = schema[key](val.strip())
        except ValueError:
            raise SpecError(f"bad value for {key}: {val!r}") from None
    return out


def _split(text: str) -> Tuple[str, str]:
    kind, _, body = text.partition(":")
    return kind.strip().lower(), body.strip()


def parse_domain(text: str, shape) -> FeasibleDomain:
    kind, body = _split(text)
    try:
        r = float(body)
    except ValueError:
        raise SpecError(f"domain {text!r} needs a numeric radius, e.g. l1:1") from None
    if r <= 0:
        raise SpecError("domain radius must be positive")
    if kind in ("trace_norm", "trace", "nuclear"):
        if len(shape) != 2:
            raise SpecError("a trace-norm ball needs a matrix-valued problem")
        return TraceNormBall(r, shape)
    if kind == "l1":
        return L1Ball(r, shape)
    if kind == "l2":
        return L2Ball(r, shape)
    if kind == "simplex":
        return Simplex(r, shape)
    raise SpecError(f"unknown domain {kind!r}; use trace_norm, l1, l2 or simplex")


def _problem_shape(text: str) -> Tuple[str, Dict[str, object]]:
    kind, body = _split(text)
    if kind == "quadratic":
        opts = dict(dim=10, n=20, L=4.0, alpha=1.0, seed=0, placement="interior")
        opts.update(_kv(body, _QUAD_KEYS))
        return kind, opts
    if kind == "synthetic":
        opts = dict(n=2000, m=50, h=10, seed=0)
        opts.update(_kv(body, _SYNTH_KEYS))
        return kind, opts
    if kind == "logistic":
        if not body:
            raise SpecError("logistic problems need a dataset path: logistic:PATH")
        return kind, {"path": body}
    raise SpecError(f"unknown problem {kind!r}; use quadratic, logistic or synthetic")


def build(problem: str, domain: str) -> Tuple[FiniteSumObjective, FeasibleDomain]:
    """Instantiate the objective and the feasible set described by two spec strings."""
    kind, opts = _problem_shape(problem)
    if kind == "quadratic":
        dim = int(opts.pop("dim"))
        dom = parse_domain(domain, (dim,))
        opts["diagonal"] = bool(opts.get("diagonal", 0))
        try:
            q = quadratic_make(dim, opts.pop("L"), opts.pop("alpha"), opts.pop("n"),
                               opts.pop("seed"), domain=dom, **opts)
        except ValueError as exc:
            raise SpecError(str(exc)) from None
        return q, dom
    if kind == "synthetic":
        ds = synth_multiclass(**opts)
    else:
        try:
            ds = load(opts["path"])
        except OSError as exc:
            raise SpecError(f"cannot read dataset {opts['path']!r}: {exc}") from None
    obj = MulticlassLogistic(ds)
    return obj, parse_domain(domain, obj.shape)


@dataclasses.dataclass
class RunSpec:
    problem: str
    domain: str
    solver: str
    config: SolverConfig = dataclasses.field(default_factory=SolverConfig)
    out: Optional[str] = None
    seeds: List[int] = dataclasses.field(default_factory=lambda: [0])
    record_wall_time: bool = False
    tune: bool = False            # grid-search the SGD/SVRG rate constant

    def validate(self, domain: Optional[FeasibleDomain] = None) -> None:
        if self.solver not in SOLVERS:
            raise SpecError(f"unknown solver {self.solver!r}; choose from {sorted(SOLVERS)}")
        if not self.seeds:
            raise SpecError("at least one seed is required")
        if domain is not None and self.solver in ("sgd", "svrg") and not domain.can_project:
            raise SpecError(f"{self.solver} needs a projectable domain")
        if self.config.theory and self.solver == "storc" and self.config.case is None:
            raise SpecError("theory-mode storc needs --case a, b or c")


def reference_value(obj: FiniteSumObjective) -> Optional[float]:
    """Known optimal value, when the problem carries one."""
    if isinstance(obj, QuadraticProblem):
        return obj.f_star
    return None
