"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on the same inputs under both backends; the table reports
the best time of ``--repeat`` runs and the speedup of the extension.
"""
import argparse
import timeit

import numpy as np

from vrfw._kernels import _fallback
from vrfw.dataio import synth_multiclass

try:
    from vrfw._kernels import _ext
except ImportError:
    _ext = None


def cases():
    ds = synth_multiclass(2000, 50, 10, seed=0)
    arrays = (np.ascontiguousarray(ds.indptr, dtype=np.int64),
              np.ascontiguousarray(ds.indices, dtype=np.int64),
              np.ascontiguousarray(ds.data, dtype=float),
              np.ascontiguousarray(ds.labels, dtype=np.int64))
    gen = np.random.default_rng(0)
    W = gen.standard_normal((ds.num_classes, ds.num_features))
    full = np.ones(ds.n, dtype=np.int64)
    batch = np.bincount(gen.integers(ds.n, size=100), minlength=ds.n).astype(np.int64)
    G = gen.standard_normal((10, 50))
    start = np.ones(10)  # over the shorter side
    return [
        ("logistic_values n=2000", lambda k: k.logistic_values(*arrays, W)),
        ("batch_gradient full", lambda k: k.logistic_batch_gradient(*arrays, full, W)),
        ("batch_gradient m=100", lambda k: k.logistic_batch_gradient(*arrays, batch, W)),
        ("top_singular 10x50", lambda k: k.top_singular(G, start, 1e-9, 1000)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ext is None:
        print("compiled extension not built; only the fallback can be timed")
    print("%-24s %12s %12s %8s" % ("kernel", "python (ms)", "cython (ms)", "speedup"))
    for name, call in cases():
        times = []
        for mod in (_fallback, _ext):
            if mod is None:
                times.append(float("nan"))
                continue
            number = max(1, int(0.2 / max(timeit.timeit(lambda: call(mod), number=1), 1e-6)))
            best = min(timeit.repeat(lambda: call(mod), number=number, repeat=args.repeat))
            times.append(1e3 * best / number)
        print("%-24s %12.3f %12.3f %7.1fx" % (name, times[0], times[1], times[0] / times[1]))


if __name__ == "__main__":
    main()
