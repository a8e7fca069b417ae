"""Compare the compiled and numpy implementations of the CF kernels.

    python benchmarks/bench_backends.py [--dim 16] [--bank-size 1024] [--repeats 3]

Prints one line per (function, N) with both timings and the speedup.
"""
import argparse
import time

import numpy as np

from specmatch import _kernels_py

try:
    from specmatch import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--bank-size", type=int, default=1024)
    p.add_argument("--sizes", default="512,1024,2048,4096")
    p.add_argument("--repeats", type=int, default=3)
    args = p.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not available; only the numpy backend can run")
        return 1

    rng = np.random.default_rng(0)
    T = rng.normal(scale=2.0, size=(args.bank_size, args.dim))
    wu, wv = rng.normal(size=args.bank_size), rng.normal(size=args.bank_size)
    print(f"{'function':<9} {'N':>6} {'numpy_s':>10} {'cython_s':>10} {'speedup':>8}")
    for n in (int(v) for v in args.sizes.split(",")):
        X = rng.normal(size=(n, args.dim))
        for name, py, cy in [
            ("ecf", lambda: _kernels_py.ecf(X, T), lambda: _ckernels.ecf(X, T)),
            ("ecf_grad", lambda: _kernels_py.ecf_grad(X, T, wu, wv),
             lambda: _ckernels.ecf_grad(X, T, wu, wv)),
        ]:
            np.testing.assert_allclose(py(), cy(), rtol=1e-9, atol=1e-9)
            t_py, t_cy = best_of(py, args.repeats), best_of(cy, args.repeats)
            print(f"{name:<9} {n:>6} {t_py:>10.4f} {t_cy:>10.4f} {t_py / t_cy:>8.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
