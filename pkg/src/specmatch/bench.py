"""Wall-clock scaling of the spectral estimator against the Gram-matrix MMD."""
from __future__ import annotations

import time

from .kernels import KernelSpec, spectral_sample
from .mmd import mmd2_biased
from .rng import CounterStream
from .spectral import empirical_cf, sdd_estimate


def _best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(sizes=(512, 1024, 2048, 4096), dim: int = 16, bank_size: int = 1024,
              seed: int = 0, repeats: int = 3, gamma: float = 2.0, **_ignored):
    """Rows ``(method, N, seconds, ratio_vs_prev)``, SDD rows first.

    The SDD timing includes building both empirical CFs; the bank is drawn once.
    """
    spec = KernelSpec("rbf", gamma=gamma)
    bank = spectral_sample(spec, bank_size, dim, seed, "bench")
    data = {}
    for n in sizes:
        s = CounterStream(seed, "bench-data", n)
        data[n] = (s.normal((n, dim)), 1.2 * s.normal((n, dim)))

    methods = {
        "sdd": lambda X, Y: sdd_estimate(empirical_cf(X, bank), empirical_cf(Y, bank)),
        "mmd_gram": lambda X, Y: mmd2_biased(spec, X, Y),
    }
    rows = []
    for name, fn in methods.items():
        prev = None
        for n in sizes:
            X, Y = data[n]
            fn(X, Y)  # warm-up
            sec = _best_time(lambda: fn(X, Y), repeats)
            rows.append((name, n, sec, None if prev is None else sec / prev))
            prev = sec
    return rows


def total_ratio(rows, method: str) -> float:
    """seconds(largest N) / seconds(smallest N) for one method."""
    secs = [(n, s) for m, n, s, _ in rows if m == method]
    secs.sort()
    return secs[-1][1] / secs[0][1]
