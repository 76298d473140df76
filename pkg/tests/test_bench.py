import json
import math
import pathlib

import numpy as np
import pytest

from vrfw.bench import (HEADER, RunSpec, SpecError, TraceFile, build, first_hits, fit_line,
                        parse_domain, rate_fit, run, schedule_table)
from vrfw.bench.cli import main
from vrfw.dataio import dump, synth_multiclass
from vrfw.oracles import L1Ball, L2Ball, Simplex, TraceNormBall
from vrfw.solvers import SolverConfig

DATA = pathlib.Path(__file__).parent / "data"

GOLDEN = {
    "fw": ("fw", {}),
    "svrf": ("svrf", {}),
    "sfw": ("sfw", dict(L=2.0, D=1.0, G=4.0)),
    "scgs": ("scgs", dict(L=2.0, D=1.0, G=4.0, N=5)),
    "storc_a": ("storc", dict(case="a", L=6.0, D=1.0)),
    "storc_b": ("storc", dict(case="b", L=2.0, D=1.0, G=3.0)),
    "storc_c": ("storc", dict(case="c", L=4.0, D=1.0, mu=4.0)),
}


# -- schedule tables -----------------------------------------------------

@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_schedule_golden(name):
    solver, params = GOLDEN[name]
    expect = (DATA / f"schedule_{name}.txt").read_text()
    assert schedule_table(solver, params, 2, 5) + "\n" == expect


def _cells(table, header_word):
    lines = table.splitlines()
    start = next(i for i, ln in enumerate(lines) if ln.split()[:1] == [header_word])
    rows = []
    for ln in lines[start + 1:]:
        if not ln.strip() or not ln.split()[0].isdigit():
            break
        rows.append(ln.split())
    return lines[start].split(), rows


def test_svrf_table_values():
    head, rows = _cells(schedule_table("svrf", {}, 3, 5), "t")
    assert [r[1] for r in rows] == ["14", "30", "62"]
    head, rows = _cells(schedule_table("svrf", {}, 3, 5), "k")
    assert [int(r[head.index("m_k")]) for r in rows] == [96 * (k + 1) for k in range(1, 6)]


def test_storc_case_c_table_values():
    text = schedule_table("storc", dict(case="c", L=4.0, D=1.0, mu=4.0), 1, 3)
    epochs, steps = text.split("\n\n")
    _, rows = _cells(epochs, "t")
    assert rows[0][1] == "12"
    head, rows = _cells(steps, "t")
    assert {int(r[head.index("m_tk")]) for r in rows} == {268800}
    assert [float(r[head.index("beta_k")]) for r in rows] == [12.0, 6.0, 4.0]


def test_schedule_errors():
    with pytest.raises(SpecError):
        schedule_table("storc", dict(L=1.0, D=1.0), 1, 1)
    with pytest.raises(SpecError):
        schedule_table("sfw", dict(L=1.0, D=1.0), 1, 1)
    with pytest.raises(SpecError):
        schedule_table("fw", {}, 0, 1)


# -- spec strings --------------------------------------------------------

def test_parse_domain_kinds():
    assert isinstance(parse_domain("trace_norm:50", (3, 4)), TraceNormBall)
    assert isinstance(parse_domain("l1:2", (5,)), L1Ball)
    assert isinstance(parse_domain("l2:1", (5,)), L2Ball)
    assert isinstance(parse_domain("simplex:1", (5,)), Simplex)
    for bad in ("l3:1", "l1:x", "l1:-1"):
        with pytest.raises(SpecError):
            parse_domain(bad, (5,))
    with pytest.raises(SpecError):
        parse_domain("trace_norm:1", (5,))


def test_build_problems(tmp_path):
    q, dom = build("quadratic:dim=6,n=4,L=3,alpha=1,seed=2", "l2:2")
    assert q.n == 4 and q.shape == (6,) and q.f_star is not None
    obj, dom = build("synthetic:n=30,m=7,h=3,seed=1", "trace_norm:5")
    assert obj.shape == (3, 7) and dom.tau == 5.0
    dump(synth_multiclass(10, 4, 2, seed=0), tmp_path / "d.txt")
    obj, _ = build(f"logistic:{tmp_path / 'd.txt'}", "trace_norm:1")
    assert obj.n == 10
    for bad in ("quadratic:dim=3,bogus=1", "quadratic:dim=x", "cubic:", "logistic:",
                f"logistic:{tmp_path / 'missing.txt'}"):
        with pytest.raises(SpecError):
            build(bad, "l2:1")


def test_runspec_validation():
    _, l1 = build("quadratic:dim=3", "l1:1")
    RunSpec("quadratic:dim=3", "l1:1", "sgd").validate(l1)
    with pytest.raises(SpecError):
        RunSpec("quadratic:dim=3", "l1:1", "adam").validate(l1)
    with pytest.raises(SpecError):
        RunSpec("quadratic:dim=3", "l1:1", "fw", seeds=[]).validate(l1)
    with pytest.raises(SpecError):
        RunSpec("quadratic:dim=3", "l1:1", "storc", SolverConfig(mode="theory")).validate(l1)

    class NoProj(L1Ball):
        project = L1Ball.__mro__[1].project

    with pytest.raises(SpecError, match="projectable"):
        RunSpec("quadratic:dim=3", "l1:1", "svrg").validate(NoProj(1.0, 3))


# -- traces --------------------------------------------------------------

def test_fw_run_costs():
    spec = RunSpec("quadratic:dim=5,n=8,seed=1", "l1:1", "fw", SolverConfig(iterations=100))
    trace, summary = run(spec)
    last = trace.rows[-1]
    assert last[HEADER.index("lmo_calls")] == 100 and last[HEADER.index("exact_grads")] == 100
    assert summary.startswith("fw: final objective") and "± 0" in summary and "1 seed" in summary


def test_csv_schema_and_round_trip(tmp_path):
    spec = RunSpec("quadratic:dim=4,n=6,seed=2", "l2:1", "svrf", SolverConfig(epochs=2),
                   out=str(tmp_path / "t.csv"), seeds=[0, 3])
    trace, _ = run(spec)
    text = (tmp_path / "t.csv").read_text()
    assert text.splitlines()[0] == \
        "seed,epoch,inner_step,exact_grads,stochastic_grads,lmo_calls,projections,wall_time_s,objective"
    back = TraceFile.read(tmp_path / "t.csv")
    assert back.to_csv() == text and back.seeds() == [0, 3]
    meta = json.loads((tmp_path / "t.csv.json").read_text())
    assert meta["solver"] == "svrf" and meta["f_star"] == pytest.approx(trace.meta["f_star"])
    assert all(r[HEADER.index("wall_time_s")] == 0.0 for r in back.rows)
    with pytest.raises(ValueError):
        TraceFile.from_csv("a,b\n1,2\n")


@pytest.mark.parametrize("solver", ["fw", "sfw", "svrf", "scgs", "storc", "sgd", "svrg"])
def test_same_spec_same_bytes(solver, tmp_path):
    cfg = SolverConfig(iterations=12, epochs=2, snapshot_gap=6, batch_size=7, step=0.1)
    paths = []
    for i in range(2):
        p = tmp_path / f"{i}.csv"
        run(RunSpec("quadratic:dim=5,n=9,seed=4", "l2:1", solver, cfg, str(p), [1, 2]))
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_parallel_seeds_match_serial():
    spec = RunSpec("quadratic:dim=5,n=9,seed=4", "l1:1", "storc", SolverConfig(epochs=2),
                   seeds=[0, 1, 2])
    assert run(spec, jobs=1)[0].to_csv() == run(spec, jobs=3)[0].to_csv()


def test_wall_time_flag():
    spec = RunSpec("quadratic:dim=5", "l1:1", "fw", SolverConfig(iterations=30),
                   record_wall_time=True)
    trace, _ = run(spec)
    assert trace.rows[-1][HEADER.index("wall_time_s")] > 0.0


def test_step_tuning_records_choice():
    spec = RunSpec("quadratic:dim=5,n=9", "l2:1", "sgd", SolverConfig(iterations=50), tune=True)
    trace, _ = run(spec)
    assert trace.meta["step"] in (0.01, 0.1, 1.0, 10.0)
    assert set(trace.meta["step_grid"]) == {"0.01", "0.1", "1.0", "10.0"}


# -- rate fits -----------------------------------------------------------

def _synthetic_trace(cost_of_eps, eps_grid, fstar=0.0):
    rows = [(0, 1, k, 0, int(round(cost_of_eps(e))), 0, 0, 0.0, fstar + e)
            for k, e in enumerate(eps_grid)]
    return TraceFile(rows, {"f_star": fstar})


def test_rate_fit_recovers_power_law():
    eps = np.logspace(0, -4, 41)
    trace = _synthetic_trace(lambda e: 1000.0 / e ** 2, eps)
    targets = [10 ** -x for x in np.arange(1, 4.01, 0.5)]
    fit = rate_fit(trace, "stochastic_grads", targets)
    assert fit.slope == pytest.approx(2.0, abs=1e-6) and fit.r2 > 0.999999
    assert not fit.unreached


def test_rate_fit_recovers_log_law():
    eps = np.logspace(0, -4, 41)
    trace = _synthetic_trace(lambda e: 5000.0 * math.log(1 / e) + 10, eps)
    fit = rate_fit(trace, "stochastic_grads", [10 ** -x for x in range(1, 5)], kind="log")
    assert fit.slope == pytest.approx(5000.0, rel=1e-3) and fit.r2 > 0.999


def test_rate_fit_unreached_and_errors():
    trace = _synthetic_trace(lambda e: 1 / e, [1.0, 0.1, 0.01])
    fit = rate_fit(trace, "stochastic_grads", [0.1, 0.01, 0.001])
    assert fit.unreached == [0.001] and "unreached" in fit.format()
    with pytest.raises(ValueError):
        rate_fit(trace, "objective", [0.1])
    with pytest.raises(ValueError):
        rate_fit(TraceFile(trace.rows, {}), "stochastic_grads", [0.1])
    with pytest.raises(ValueError):
        rate_fit(trace, "stochastic_grads", [0.1], kind="cubic")


def test_first_hits_and_fit_line():
    assert first_hits([1, 2, 3, 4], [5.0, 3.0, 1.5, 1.1], 1.0, [2.5, 0.5, 0.01]) == [2.0, 3.0, None]
    a, b, r2 = fit_line([0, 1, 2], [1, 3, 5])
    assert (a, b, r2) == pytest.approx((2.0, 1.0, 1.0))
    assert all(math.isnan(v) for v in fit_line([1], [1]))


def test_rate_fit_averages_seeds():
    rows = [(s, 1, 0, 0, c, 0, 0, 0.0, 1.1) for s, c in ((0, 10), (1, 30))]
    fit = rate_fit(TraceFile(rows, {"f_star": 1.0}), "stochastic_grads", [0.2, 0.15])
    assert [c for _, c in fit.points] == [20.0, 20.0]


# -- command line --------------------------------------------------------

def test_cli_run_and_rates(tmp_path, capsys):
    out = tmp_path / "run.csv"
    rc = main(["run", "--problem", "quadratic:dim=5,n=9", "--domain", "l2:1", "--solver", "svrf",
               "--seeds", "0,1", "--epochs", "3", "--out", str(out)])
    assert rc == 0 and "svrf: final objective" in capsys.readouterr().out
    assert TraceFile.read(out).seeds() == [0, 1]
    rc = main(["rates", str(out), "--eps", "1e-1,1e-2", "--column", "lmo_calls"])
    assert rc == 0 and "log-log slope" in capsys.readouterr().out
    rc = main(["rates", str(out), "--eps", "1e-1", "--reference-lmo", "2000"])
    assert rc == 0


def test_cli_run_to_stdout(capsys):
    assert main(["run", "--problem", "quadratic:dim=3", "--domain", "l1:1", "--solver", "fw",
                 "--iterations", "5"]) == 0
    cap = capsys.readouterr()
    assert cap.out.splitlines()[0] == ",".join(HEADER) and len(cap.out.splitlines()) == 6
    assert "fw: final objective" in cap.err


def test_cli_schedule_and_verify(capsys):
    assert main(["schedule", "--solver", "storc", "--case", "c", "--L", "4", "--D", "1",
                 "--mu", "4", "--t-max", "1", "--k-max", "1"]) == 0
    assert "268800" in capsys.readouterr().out
    assert main(["verify"]) == 0
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["run", "--problem", "cubic:", "--domain", "l1:1", "--solver", "fw"],
    ["run", "--problem", "quadratic:dim=3", "--domain", "trace_norm:1", "--solver", "fw"],
    ["run", "--problem", "logistic:/nonexistent/file", "--domain", "trace_norm:1",
     "--solver", "fw"],
    ["run", "--problem", "quadratic:dim=3", "--domain", "l1:1", "--solver", "storc",
     "--mode", "theory"],
    ["rates", "/nonexistent/trace.csv"],
    ["schedule", "--solver", "sfw"],
])
def test_cli_spec_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err.startswith("vrfw: ")


def test_cli_bad_dataset_exit_1(tmp_path, capsys):
    (tmp_path / "bad.txt").write_text("1 2:1 1:1\n")
    assert main(["run", "--problem", f"logistic:{tmp_path / 'bad.txt'}", "--domain",
                 "trace_norm:1", "--solver", "fw"]) == 1
    assert "line 1" in capsys.readouterr().err


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_cli_numerical_failure_exit_2(tmp_path, capsys):
    # feature values near the float limit overflow the class scores
    (tmp_path / "huge.txt").write_text("0 1:1e308\n1 1:-1e308\n")
    argv = ["run", "--problem", f"logistic:{tmp_path / 'huge.txt'}", "--domain", "trace_norm:10",
            "--solver", "fw", "--iterations", "3"]
    assert main(argv) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_cli_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["run", "--problem", "quadratic:"])
    assert info.value.code == 2
