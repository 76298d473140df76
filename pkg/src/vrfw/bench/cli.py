"""Command-line entry point: ``vrfw {run,rates,schedule,verify}``.

Exit status is 0 on success, 1 for an invalid specification or input, and 2
when a run hits a numerical failure (non-finite objective).
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from ..dataio import DatasetFormatError
from ..solvers import SOLVERS, NumericalError, SolverConfig
from .rates import rate_fit
from .specs import RunSpec, SpecError, build
from .tables import schedule_table
from .trace import TraceFile, reference_run, run
from .verify import run_checks

EXIT_OK, EXIT_SPEC, EXIT_NUMERIC = 0, 1, 2
DEFAULT_EPS = "1e-1,3.16e-2,1e-2,3.16e-3,1e-3,3.16e-4,1e-4"


def _ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vrfw", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a solver over one or more seeds and write a CSV trace")
    r.add_argument("--problem", required=True, help="quadratic:..., logistic:PATH or synthetic:...")
    r.add_argument("--domain", required=True, help="trace_norm:TAU, l1:R, l2:R or simplex:R")
    r.add_argument("--solver", required=True, choices=sorted(SOLVERS))
    r.add_argument("--seed", type=int, default=None, help="single seed (overrides --seeds)")
    r.add_argument("--seeds", type=_ints, default=[0], help="comma-separated seeds")
    r.add_argument("--mode", choices=("theory", "practical"), default="practical")
    r.add_argument("--case", choices=("a", "b", "c"), default=None, help="STORC theory case")
    r.add_argument("--out", default=None, help="CSV path (metadata goes to PATH.json)")
    r.add_argument("--epochs", type=int, default=4)
    r.add_argument("--iterations", type=int, default=100)
    r.add_argument("--batch-size", type=int, default=100)
    r.add_argument("--snapshot-gap", type=int, default=50)
    r.add_argument("--step", type=float, default=None,
                   help="SGD/SVRG rate constant; grid-searched when omitted")
    r.add_argument("--eval-every", type=int, default=1)
    r.add_argument("--budget", type=float, default=None, help="gradient-equivalent budget")
    r.add_argument("--wall-time", action="store_true",
                   help="record wall-clock times (the CSV is then no longer byte-reproducible)")
    r.add_argument("--jobs", type=int, default=1, help="worker processes for independent seeds")

    f = sub.add_parser("rates", help="fit cost-to-accuracy rates from a CSV trace")
    f.add_argument("trace")
    f.add_argument("--column", default="stochastic_grads")
    f.add_argument("--eps", type=_floats, default=_floats(DEFAULT_EPS))
    f.add_argument("--kind", choices=("power", "log"), default="power")
    f.add_argument("--fstar", type=float, default=None,
                   help="reference optimum; defaults to the trace metadata")
    f.add_argument("--reference-lmo", type=int, default=None,
                   help="compute f* by a Frank-Wolfe run of this many LMO calls on the traced problem")

    s = sub.add_parser("schedule", help="print a solver's theory schedule")
    s.add_argument("--solver", required=True, choices=sorted(SOLVERS))
    s.add_argument("--case", choices=("a", "b", "c"), default=None)
    s.add_argument("--t-max", type=int, default=3)
    s.add_argument("--k-max", type=int, default=5)
    for name in ("L", "D", "G", "mu", "N", "c"):
        s.add_argument(f"--{name}", type=float, default=None)

    sub.add_parser("verify", help="run the quick invariant checks")
    return p


def _cmd_run(a) -> int:
    seeds = [a.seed] if a.seed is not None else a.seeds
    cfg = SolverConfig(mode=a.mode, epochs=a.epochs, iterations=a.iterations,
                       batch_size=a.batch_size, snapshot_gap=a.snapshot_gap,
                       step=a.step if a.step is not None else 1.0, case=a.case,
                       eval_every=a.eval_every, budget=a.budget)
    spec = RunSpec(a.problem, a.domain, a.solver, cfg, a.out, seeds,
                   record_wall_time=a.wall_time, tune=a.step is None)
    trace, summary = run(spec, jobs=a.jobs)
    if a.out is None:
        sys.stdout.write(trace.to_csv())
    print(summary, file=sys.stderr if a.out is None else sys.stdout)
    return EXIT_OK


def _cmd_rates(a) -> int:
    trace = TraceFile.read(a.trace)
    fstar = a.fstar
    if fstar is None and a.reference_lmo is not None:
        if "problem" not in trace.meta:
            raise SpecError("trace metadata does not name its problem")
        obj, dom = build(trace.meta["problem"], trace.meta["domain"])
        fstar = reference_run(obj, dom, a.reference_lmo)
    fit = rate_fit(trace, a.column, a.eps, fstar, a.kind)
    print(fit.format())
    return EXIT_OK


def _cmd_schedule(a) -> int:
    params = {k: getattr(a, k) for k in ("L", "D", "G", "mu", "N", "c")}
    params["case"] = a.case
    print(schedule_table(a.solver, params, a.t_max, a.k_max))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    a = _parser().parse_args(argv)
    try:
        if a.command == "run":
            return _cmd_run(a)
        if a.command == "rates":
            return _cmd_rates(a)
        if a.command == "schedule":
            return _cmd_schedule(a)
        return EXIT_OK if run_checks() else EXIT_SPEC
    except NumericalError as exc:
        print(f"vrfw: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SpecError, DatasetFormatError, ValueError, OSError) as exc:
        print(f"vrfw: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
