"""Batch of numerical property checks with measured-vs-tolerated reporting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mmd, spectral
from .kernels import KernelSpec, spectral_sample
from .rng import CounterStream


@dataclass
class PropertyResult:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""


def _random_cf_pair(stream: CounterStream, L: int):
    def draw():
        r = np.sqrt(stream.uniform(L))
        th = math.pi * (2.0 * stream.uniform(L) - 1.0)
        return r * np.exp(1j * th)

    return (spectral.EmpiricalCF(draw(), "verify", 1),
            spectral.EmpiricalCF(draw(), "verify", 1))


def check_bochner(seed: int, pairs: int = 20, n: int = 200, bank_size: int = 50000,
                  gamma: float = 2.0) -> PropertyResult:
    """|SDD - Gram MMD^2| within 3 Monte-Carlo standard errors for >= 95% of pairs."""
    spec = KernelSpec("rbf", gamma=gamma)
    bank = spectral_sample(spec, bank_size, 2, seed, "verify-bochner")
    hits = 0
    gaps, ses = [], []
    for i in range(pairs):
        s = CounterStream(seed, "verify-bochner-data", i)
        X = s.normal((n, 2))
        shift, spread = 0.5 * s.normal(2), 1.0 + 0.5 * s.uniform(1)[0]
        Y = shift + spread * s.normal((n, 2))
        phi_T, phi_S = spectral.empirical_cf(X, bank), spectral.empirical_cf(Y, bank)
        gap = abs(spectral.sdd_estimate(phi_T, phi_S) - mmd.mmd2_biased(spec, X, Y))
        se = spectral.sdd_standard_error(phi_T, phi_S)
        ses.append(se)
        gaps.append(gap)
        hits += gap <= 3.0 * se
    need = math.ceil(0.95 * pairs)
    tol = 3.0 * float(np.median(ses))
    return PropertyResult(
        "bochner_equivalence", float(np.median(gaps)), tol, hits >= need,
        f"{hits}/{pairs} within 3 SE (need {need}); L={bank_size}; measured = median gap, tolerance = 3 x median SE ~ 1/sqrt(L)",
    )


def check_decomposition(seed: int, pairs: int = 1000, L: int = 16) -> PropertyResult:
    """amp + cross reproduces |dphi|^2; alpha=0.5 discrepancy is half the SDD."""
    s = CounterStream(seed, "verify-decomp")
    worst = 0.0
    worst_half = 0.0
    for _ in range(pairs):
        a, b = _random_cf_pair(s, L)
        amp, cross = spectral.amp_phase_decompose(a, b)
        d = a.values - b.values
        worst = max(worst, float(np.max(np.abs(amp + cross - (d.real**2 + d.imag**2)))))
        half = spectral.class_discrepancy(a, b, 0.5) - 0.5 * spectral.sdd_estimate(a, b)
        worst_half = max(worst_half, abs(half))
    measured = max(worst, worst_half)
    return PropertyResult("decomposition_identity", measured, 1e-12, measured <= 1e-12,
                          f"max identity error {worst:.3g}, alpha=0.5 error {worst_half:.3g}")


def check_cfd_sandwich(seed: int, pairs: int = 100, L: int = 64) -> PropertyResult:
    s = CounterStream(seed, "verify-cfd")
    slack = math.inf
    for _ in range(pairs):
        a, b = _random_cf_pair(s, L)
        sdd = spectral.sdd_estimate(a, b)
        cfd = spectral.cfd_mu_estimate(a, b)
        slack = min(slack, math.sqrt(a.mass) * math.sqrt(sdd) - cfd, 2.0 * cfd - sdd)
    return PropertyResult("cfd_sandwich", slack, -1e-12, slack >= -1e-12,
                          "min slack over both inequalities")


def check_moment_expansion(order: int = 12, sigma: float = 1.0) -> PropertyResult:
    worst = 0.0
    monotone = True
    for y in (0.25, 0.5, 1.0, 1.5):
        X, Y = np.array([[0.0]]), np.array([[y]])
        terms = mmd.moment_expansion_terms(X, Y, sigma, order)
        partial = np.cumsum(terms)
        monotone &= bool(np.all(np.diff(partial) >= 0))
        gram = mmd.mmd2_biased(KernelSpec("rbf", gamma=1.0 / (2 * sigma**2)), X, Y)
        worst = max(worst, abs(partial[-1] - gram))
    return PropertyResult("moment_expansion", worst, 1e-4, monotone and worst <= 1e-4,
                          f"order {order}, partial sums {'nondecreasing' if monotone else 'NOT monotone'}")


def check_cumulants(seed: int, n: int = 10000) -> PropertyResult:
    s = CounterStream(seed, "verify-cumulant")
    A = np.array([[1.0, 0.0], [0.6, 1.2]])
    X = np.array([0.5, -0.3]) + s.normal((n, 2)) @ A.T
    mean, cov = mmd.logcf_cumulants(X)
    err = max(float(np.max(np.abs(mean - X.mean(axis=0)))),
              float(np.max(np.abs(cov - np.cov(X.T, bias=True)))))
    return PropertyResult("logcf_cumulants", err, 0.05, err <= 0.05, f"N={n}")


def fd_gradient(X, Y, bank, alpha, h=1e-5) -> np.ndarray:
    """Central finite-difference gradient of the class discrepancy in ``Y``."""
    phi_T = spectral.empirical_cf(X, bank)

    def f(Z):
        return spectral.class_discrepancy(phi_T, spectral.empirical_cf(Z, bank), alpha)

    g = np.zeros_like(Y)
    for j in range(Y.shape[0]):
        for d in range(Y.shape[1]):
            Yp, Ym = Y.copy(), Y.copy()
            Yp[j, d] += h
            Ym[j, d] -= h
            g[j, d] = (f(Yp) - f(Ym)) / (2 * h)
    return g


def gradient_rel_error(g, fd) -> float:
    """Max-norm error relative to the max-norm of the reference."""
    scale = float(np.max(np.abs(fd)))
    return float(np.max(np.abs(g - fd))) / scale if scale > 0 else float(np.max(np.abs(g)))


def check_gradient(seed: int, instances: int = 50) -> PropertyResult:
    worst = 0.0
    for i in range(instances):
        s = CounterStream(seed, "verify-grad", i)
        N = 2 + s.integers(7, 1)[0]
        M = 1 + s.integers(4, 1)[0]
        D = 1 + s.integers(3, 1)[0]
        L = 8 + s.integers(57, 1)[0]
        alpha = 0.05 + 0.9 * s.uniform(1)[0]
        X = s.normal((N, D))
        Y = 0.7 * s.normal((M, D))
        bank = spectral_sample(KernelSpec("rbf", gamma=2.0), int(L), int(D), seed, "verify-grad", i)
        g = spectral.sdd_gradient(X, Y, bank, alpha)
        worst = max(worst, gradient_rel_error(g, fd_gradient(X, Y, bank, alpha)))
    return PropertyResult("gradient_fd", worst, 1e-5, worst <= 1e-5,
                          f"{instances} instances, central differences h=1e-5")


def run_suite(seed: int = 0, bank_size: int = 50000, pairs: int = 20, samples: int = 200,
              cf_pairs: int = 1000, sandwich_pairs: int = 100, cumulant_samples: int = 10000,
              grad_instances: int = 50, **_ignored) -> list[PropertyResult]:
    return [
        check_bochner(seed, pairs, samples, bank_size),
        check_decomposition(seed, cf_pairs),
        check_cfd_sandwich(seed, sandwich_pairs),
        check_moment_expansion(),
        check_cumulants(seed, cumulant_samples),
        check_gradient(seed, grad_instances),
    ]


def format_table(results) -> str:
    w = max(len(r.name) for r in results)
    lines = [f"{'property':<{w}}  {'status':<6}  {'measured':>12}  {'tolerance':>12}  detail"]
    for r in results:
        lines.append(
            f"{r.name:<{w}}  {'PASS' if r.passed else 'FAIL':<6}  {r.measured:>12.4g}  "
            f"{r.tolerance:>12.4g}  {r.detail}"
        )
    return "\n".join(lines)
