import os
import subprocess
import sys

import numpy as np
import pytest

from vrfw import _kernels
from vrfw._kernels import _fallback
from vrfw.dataio import synth_multiclass

ext = pytest.importorskip("vrfw._kernels._ext", reason="compiled extension not built")


def _csr(ds):
    return ds.indptr, ds.indices, ds.data, ds.labels


@pytest.fixture(scope="module")
def data():
    return _csr(synth_multiclass(60, 15, 6, seed=21))


def test_backend_selected():
    assert _kernels.BACKEND == "cython"
    assert _fallback.BACKEND == "python"


@pytest.mark.parametrize("scale", [0.0, 1.0, 50.0, 800.0])
def test_values_parity(data, scale, gen):
    W = scale * gen.standard_normal((6, 15))
    a = ext.logistic_values(*data, W)
    b = _fallback.logistic_values(*data, W)
    # exp(s - s_y) turns a score rounding of eps * |s| into the same relative error
    np.testing.assert_allclose(a, b, rtol=1e-13 * max(1.0, scale), atol=1e-300)


@pytest.mark.parametrize("scale", [0.0, 1.0, 50.0, 800.0])
def test_gradient_parity(data, scale, gen):
    W = scale * gen.standard_normal((6, 15))
    counts = gen.integers(0, 4, size=60)
    counts[0] = 1
    a = ext.logistic_batch_gradient(*data, counts, W)
    b = _fallback.logistic_batch_gradient(*data, counts, W)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("shape", [(1, 1), (5, 3), (3, 5), (40, 30)])
def test_power_iteration_parity(shape, gen):
    g = gen.standard_normal(shape)
    start = np.ones(min(shape))
    ua, sa, va, _ = ext.top_singular(g, start, 1e-10, 10000)
    ub, sb, vb, _ = _fallback.top_singular(g, start, 1e-10, 10000)
    sigma = np.linalg.svd(g, compute_uv=False)[0]
    assert sa == pytest.approx(sb, rel=1e-9) and sa == pytest.approx(sigma, rel=1e-9)
    assert abs(ua @ g @ va) == pytest.approx(sigma, rel=1e-9)
    assert abs(ub @ g @ vb) == pytest.approx(sigma, rel=1e-9)


def test_pure_python_switch():
    env = dict(os.environ, VRFW_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import vrfw; print(vrfw.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_pure_python_verify_passes():
    env = dict(os.environ, VRFW_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-m", "vrfw.bench.cli", "verify"],
                         env=env, capture_output=True, text=True)
    assert out.returncode == 0, out.stdout + out.stderr
    assert "kernel backend: python" in out.stdout and "FAIL" not in out.stdout
