import sys

import numpy as np
import pytest

from vrfw.dataio import synth_multiclass
from vrfw.oracles import L1Ball, L2Ball, Simplex, TraceNormBall
from vrfw.problems import MulticlassLogistic, quadratic_make


@pytest.fixture
def gen():
    return np.random.default_rng(20240501)


@pytest.fixture(scope="session")
def quad():
    """n = 20, d = 10 quadratic with its optimum strictly inside an L2 ball."""
    return quadratic_make(10, 4.0, 1.0, 20, seed=3, domain=L2Ball(3.0, 10))


@pytest.fixture(scope="session")
def logistic():
    return MulticlassLogistic(synth_multiclass(40, 8, 5, seed=11))


def all_domains():
    return [L1Ball(1.5, 5), Simplex(2.0, 5), L2Ball(1.0, 5, center=np.arange(5) / 5.0),
            TraceNormBall(2.0, (4, 3))]


def random_feasible(domain, gen, count):
    """Feasible probes: random convex combinations of LMO outputs, plus projections."""
    shape = domain.shape
    out = []
    for _ in range(count):
        k = int(gen.integers(1, 4))
        verts = [domain.lmo(gen.standard_normal(shape)) for _ in range(k)]
        lam = gen.dirichlet(np.ones(k))
        out.append(sum(l * v for l, v in zip(lam, verts)))
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in results:
        terminalreporter.write_line("%s  criterion %s: %s" % ("PASS" if passed else "FAIL",
                                                              criterion, detail))
