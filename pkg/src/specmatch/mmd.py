"""Exact (Gram-based) discrepancies and moment/cumulant oracles."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .kernels import KernelSpec, _as_matrix, _check_pair, gram_matrix
from .rng import CounterStream

# beyond this, factorial(order) overflows a double
MAX_EXPANSION_ORDER = 170
MAX_EXPANSION_DIM = 3


def _nonempty(X, Y):
    X, Y = _check_pair(X, Y)
    if X.shape[0] == 0 or Y.shape[0] == 0:
        raise ValidationError("sample sets must be nonempty")
    return X, Y


def mmd2_biased(spec: KernelSpec, X, Y) -> float:
    """Biased (V-statistic) estimate of the squared MMD between samples ``X`` and ``Y``."""
    X, Y = _nonempty(X, Y)
    kxx = gram_matrix(spec, X, X).mean()
    kyy = gram_matrix(spec, Y, Y).mean()
    kxy = gram_matrix(spec, X, Y).mean()
    return float(kxx - 2.0 * kxy + kyy)


def linear_mmd2(X, Y) -> float:
    """Squared distance between the sample means (the linear-kernel MMD)."""
    X, Y = _nonempty(X, Y)
    diff = X.mean(axis=0) - Y.mean(axis=0)
    return float(diff @ diff)


def permutation_null_quantile(statistic, X, Y, n_perm: int = 200, q: float = 0.95,
                              seed: int = 0) -> float:
    """``q``-quantile of ``statistic(X', Y')`` over random relabelings of the pooled sample."""
    X, Y = _nonempty(X, Y)
    pooled = np.vstack([X, Y])
    n = X.shape[0]
    stream = CounterStream(seed, "permutation")
    stats = np.empty(n_perm)
    for i in range(n_perm):
        # argsort of uniforms gives a uniform random permutation
        perm = np.argsort(stream.uniform(pooled.shape[0]), kind="stable")
        stats[i] = statistic(pooled[perm[:n]], pooled[perm[n:]])
    return float(np.quantile(stats, q))


@dataclass(frozen=True)
class MultiIndex:
    exponents: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(a) for a in self.exponents)
        if any(a < 0 for a in e):
            raise ValidationError("multi-index exponents must be nonnegative")
        object.__setattr__(self, "exponents", e)

    @property
    def order(self) -> int:
        return sum(self.exponents)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def log_factorial(self) -> float:
        return sum(math.lgamma(a + 1) for a in self.exponents)


def multi_indices(dim: int, order: int):
    """All multi-indices of length ``dim`` with exactly the given order."""
    for combo in itertools.combinations_with_replacement(range(dim), order):
        e = [0] * dim
        for i in combo:
            e[i] += 1
        yield MultiIndex(tuple(e))


def _gauss_weights(X, sigma):
    return np.exp(-np.einsum("ij,ij->i", X, X) / (2.0 * sigma * sigma))


def weighted_moment(X, alpha: MultiIndex, sigma: float) -> float:
    """Mean over rows of ``x**alpha * exp(-|x|^2 / (2 sigma^2))``."""
    X = _as_matrix(X)
    if not isinstance(alpha, MultiIndex):
        alpha = MultiIndex(tuple(alpha))
    if alpha.dim != X.shape[1]:
        raise ValidationError(f"multi-index has length {alpha.dim}, samples have dimension {X.shape[1]}")
    if not sigma > 0:
        raise ValidationError("sigma must be positive")
    mono = np.prod(X ** np.asarray(alpha.exponents, dtype=np.float64), axis=1)
    return float(np.mean(mono * _gauss_weights(X, sigma)))


def moment_expansion_terms(X, Y, sigma: float, max_order: int) -> np.ndarray:
    """Per-order contributions ``sum_{|a|=n} w_a (m_X,a - m_Y,a)^2`` for ``n = 0..max_order``."""
    X, Y = _nonempty(X, Y)
    D = X.shape[1]
    if D > MAX_EXPANSION_DIM:
        raise ValidationError(f"moment expansion supports dimension <= {MAX_EXPANSION_DIM}, got {D}")
    if max_order < 0:
        raise ValidationError("max_order must be nonnegative")
    if max_order > MAX_EXPANSION_ORDER:
        raise NumericalError(f"max_order {max_order} overflows the factorial weights")
    if not sigma > 0:
        raise ValidationError("sigma must be positive")
    wx = _gauss_weights(X, sigma)
    wy = _gauss_weights(Y, sigma)
    log_s2 = 2.0 * math.log(sigma)
    terms = np.zeros(max_order + 1)
    with np.errstate(over="raise", invalid="raise"):
        try:
            for n in range(max_order + 1):
                acc = 0.0
                for a in multi_indices(D, n):
                    e = np.asarray(a.exponents, dtype=np.float64)
                    mx = np.mean(np.prod(X ** e, axis=1) * wx)
                    my = np.mean(np.prod(Y ** e, axis=1) * wy)
                    log_w = -a.log_factorial() - n * log_s2
                    acc += math.exp(log_w) * (mx - my) ** 2
                terms[n] = acc
        except FloatingPointError as exc:
            raise NumericalError(f"moment expansion overflowed at order {n}") from exc
    if not np.all(np.isfinite(terms)):
        raise NumericalError("moment expansion produced non-finite terms")
    return terms


def gaussian_moment_expansion_mmd2(X, Y, sigma: float, max_order: int) -> float:
    """Truncated weighted-moment series for the Gaussian-kernel squared MMD.

    The kernel is ``exp(-|x-y|^2 / (2 sigma^2))``, i.e. an RBF kernel with
    ``gamma = 1 / (2 sigma^2)``.
    """
    return float(moment_expansion_terms(X, Y, sigma, max_order).sum())


def _log_ecf(X, t):
    phi = np.mean(np.exp(1j * (X @ t)))
    if abs(phi) <= 0.5:
        raise NumericalError(
            f"|empirical CF| = {abs(phi):.3g} <= 0.5 on the stencil; reduce the step h"
        )
    return np.log(phi)


def logcf_cumulants(X, h: float = 1e-3):
    """Mean and covariance from finite differences of the empirical log-CF at 0.

    Gradients use the symmetric two-point stencil, Hessian diagonals the
    three-point second difference and off-diagonals the four-point cross stencil.
    The covariance returned is the ``1/N`` sample covariance in the limit h -> 0.
    """
    X = _as_matrix(X)
    N, D = X.shape
    if N < 2:
        raise ValidationError("need at least two samples")
    if not h > 0:
        raise ValidationError("step h must be positive")
    eye = np.eye(D) * h
    psi_p = np.array([_log_ecf(X, eye[k]) for k in range(D)])
    psi_m = np.array([_log_ecf(X, -eye[k]) for k in range(D)])
    grad = (psi_p - psi_m) / (2.0 * h)
    # grad psi(0) = i * mean
    mean = grad.imag
    hess = np.empty((D, D), dtype=complex)
    for k in range(D):
        hess[k, k] = (psi_p[k] + psi_m[k]) / (h * h)  # psi(0) = log 1 = 0
        for l in range(k + 1, D):
            val = (
                _log_ecf(X, eye[k] + eye[l])
                - _log_ecf(X, eye[k] - eye[l])
                - _log_ecf(X, -eye[k] + eye[l])
                + _log_ecf(X, -eye[k] - eye[l])
            ) / (4.0 * h * h)
            hess[k, l] = hess[l, k] = val
    return mean, -hess.real
