"""Benchmark harness: run specs, CSV traces, rate fits, schedule tables, CLI."""
from .rates import RateFit, first_hits, fit_line, rate_fit
from .specs import RunSpec, SpecError, build, parse_domain
from .tables import schedule_table
from .trace import HEADER, TraceFile, reference_run, run, tune_step

__all__ = ["RateFit", "first_hits", "fit_line", "rate_fit", "RunSpec", "SpecError", "build",
           "parse_domain", "schedule_table", "HEADER", "TraceFile", "reference_run", "run",
           "tune_step"]
