"""Compare the compiled and pure-Python jet kernels.

    python benchmarks/bench_jet.py [--repeat N] [--batch B]

Kernel timings call both kernel modules directly on the same random input
(also checking they agree); the pipeline timing runs ``curvature_pack`` in a
subprocess per backend, selected with ``CURVLAB_BACKEND``.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from curvlab import _jetcore_py
from curvlab._tables import tables

try:
    from curvlab import _jetcore
except ImportError:
    _jetcore = None

PIPELINE = """
import timeit
from curvlab._backend import BACKEND
from curvlab.catalog import metric_at, parse_params
from curvlab.curvature import curvature_pack
p = parse_params("a=1,b=1,c=0.3,q=1,alpha=1", "A2")
run = lambda: curvature_pack(metric_at("A2", p, (0.1, 0.2, 0.3, 0.4)))
run()
n = {repeat}
print(BACKEND, min(timeit.repeat(run, number=1, repeat=n)))
"""


def kernel_cases(batch: int):
    rng = np.random.default_rng(0)
    t = tables(4)
    a = rng.normal(size=(batch, 70))
    b = rng.normal(size=(batch, 70))
    b[:, 0] += 5.0  # keep divisors and log arguments away from zero
    return {
        "mul": (lambda k: k.mul(a, b, t)),
        "div": (lambda k: k.div(a, b, t)),
        "exp": (lambda k: k.exp(a * 0.1, t)),
        "log": (lambda k: k.log(b, t)),
        "sincos": (lambda k: k.sincos(a, t)),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--batch", type=int, default=256, help="jets per kernel call (a rank-4 tensor has 256)")
    args = ap.parse_args()

    print(f"kernels, order 4, batch {args.batch}, best of {args.repeat} (ms per call)")
    print(f"{'kernel':8} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, call in kernel_cases(args.batch).items():
        py = min(timeit.repeat(lambda: call(_jetcore_py), number=1, repeat=args.repeat)) * 1e3
        if _jetcore is None:
            print(f"{name:8} {py:10.3f} {'n/a':>10}")
            continue
        ref, fast = call(_jetcore_py), call(_jetcore)
        np.testing.assert_allclose(np.asarray(fast), np.asarray(ref), rtol=1e-12, atol=1e-12)
        cy = min(timeit.repeat(lambda: call(_jetcore), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:8} {py:10.3f} {cy:10.3f} {py / cy:8.1f}x")

    print(f"\nfull curvature pack (A2, order 4), best of {args.repeat} (ms)")
    for backend in ("python", "cython"):
        env = dict(os.environ, CURVLAB_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c", PIPELINE.format(repeat=args.repeat)], env=env,
                             capture_output=True, text=True, check=True)
        used, secs = res.stdout.split()
        print(f"{backend:8} -> {used:8} {float(secs) * 1e3:10.2f}")


if __name__ == "__main__":
    main()
