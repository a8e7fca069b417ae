"""Empirical characteristic functions and the spectral distribution distance.

With ``phi_T``/``phi_S`` the empirical CFs of real and synthetic samples on a
shared frequency bank ``t_1..t_L`` drawn from a kernel's spectral
distribution (total mass ``m``), the Monte-Carlo spectral distance is::

    SDD = m/L * sum_i |phi_T(t_i) - phi_S(t_i)|^2

Each summand splits into an amplitude part ``(|phi_T| - |phi_S|)^2`` and a
phase part ``2 |phi_T||phi_S| (1 - cos(theta_T - theta_S))``. The class-wise
discrepancy reweights the two parts by ``alpha`` and ``1 - alpha``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ValidationError
from .features import FeatureSet
from .kernels import FrequencyBank, _as_matrix

# below this magnitude a CF has no defined phase
_PHASE_EPS = 1e-15


@dataclass(frozen=True, eq=False)
class EmpiricalCF:
    values: np.ndarray
    bank_ref: str
    sample_count: int
    mass: float = 1.0

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.values)


def empirical_cf(X, bank: FrequencyBank) -> EmpiricalCF:
    """``(1/N) sum_n exp(j t_i . x_n)`` at every frequency of the bank."""
    X = _as_matrix(X)
    if X.shape[0] == 0:
        raise ValidationError("cannot build a characteristic function from zero samples")
    if X.shape[1] != bank.dim:
        raise ValidationError(f"dimension mismatch: samples have {X.shape[1]}, bank has {bank.dim}")
    re, im = _backend.ecf(X, bank.freqs)
    return EmpiricalCF(re + 1j * im, bank.ident, X.shape[0], bank.kernel_mass)


def _same_bank(a: EmpiricalCF, b: EmpiricalCF):
    if a.bank_ref != b.bank_ref or a.values.shape != b.values.shape:
        raise ValidationError("characteristic functions were built on different frequency banks")


def sq_diff_terms(phi_T: EmpiricalCF, phi_S: EmpiricalCF) -> np.ndarray:
    _same_bank(phi_T, phi_S)
    d = phi_T.values - phi_S.values
    return d.real**2 + d.imag**2


def sdd_estimate(phi_T: EmpiricalCF, phi_S: EmpiricalCF) -> float:
    terms = sq_diff_terms(phi_T, phi_S)
    return float(phi_T.mass * terms.mean())


def sdd_standard_error(phi_T: EmpiricalCF, phi_S: EmpiricalCF) -> float:
    """Monte-Carlo standard error of :func:`sdd_estimate` from the per-frequency spread."""
    terms = phi_T.mass * sq_diff_terms(phi_T, phi_S)
    if terms.size < 2:
        return float("inf")
    return float(terms.std(ddof=1) / np.sqrt(terms.size))


def amp_phase_decompose(phi_T: EmpiricalCF, phi_S: EmpiricalCF):
    """Per-frequency amplitude and phase (cross) terms; they sum to ``|phi_T - phi_S|^2``."""
    _same_bank(phi_T, phi_S)
    tr, ti = phi_T.values.real, phi_T.values.imag
    sr, si = phi_S.values.real, phi_S.values.imag
    pa = tr * tr + ti * ti
    pb = sr * sr + si * si
    amp = (np.sqrt(pa) - np.sqrt(pb)) ** 2
    # 2ab(1 - cos dtheta) with cos dtheta = Re(phi_T conj phi_S) / (ab);
    # ab from sqrt(pa*pb) so identical CFs cancel exactly
    ab = np.sqrt(pa * pb)
    inner = tr * sr + ti * si
    cross = np.where(ab < _PHASE_EPS, 0.0, 2.0 * np.maximum(ab - inner, 0.0))
    return amp, cross


def class_discrepancy(phi_Tc: EmpiricalCF, phi_Sc: EmpiricalCF, alpha_c: float) -> float:
    amp, cross = amp_phase_decompose(phi_Tc, phi_Sc)
    return float(phi_Tc.mass * np.mean(alpha_c * amp + (1.0 - alpha_c) * cross))


def cfd_mu_estimate(phi_T: EmpiricalCF, phi_S: EmpiricalCF) -> float:
    """L1-type characteristic-function distance under the same spectral measure."""
    return float(phi_T.mass * np.sqrt(sq_diff_terms(phi_T, phi_S)).mean())


class AlphaMode(enum.Enum):
    TWO_POINT = "two_point"
    LOG_LINEAR = "log_linear"


@dataclass(frozen=True)
class AlphaPolicy:
    """Class-conditional amplitude weight ``alpha(c)`` from class counts.

    ``two_point`` gives ``alpha_head`` to classes at or above the median
    count and ``alpha_tail`` to the rest. ``log_linear`` interpolates in
    log-count between the smallest and largest class.
    """

    alpha_head: float = 0.8
    alpha_tail: float = 0.2
    mode: AlphaMode = AlphaMode.TWO_POINT
    clamp: tuple[float, float] = (0.05, 0.95)

    def __post_init__(self):
        if isinstance(self.mode, str):
            try:
                object.__setattr__(self, "mode", AlphaMode(self.mode.lower().replace("-", "_")))
            except ValueError:
                raise ValidationError(f"unknown alpha mode {self.mode!r}") from None
        for name in ("alpha_head", "alpha_tail"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")
        lo, hi = self.clamp
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValidationError(f"clamp must satisfy 0 <= lo <= hi <= 1, got {self.clamp}")
        object.__setattr__(self, "clamp", (float(lo), float(hi)))

    @classmethod
    def constant(cls, alpha: float, clamp=(0.0, 1.0)) -> "AlphaPolicy":
        return cls(alpha, alpha, AlphaMode.TWO_POINT, clamp)


def alpha_policy_eval(policy: AlphaPolicy, class_counts, c: int) -> float:
    counts = np.asarray(class_counts, dtype=np.float64)
    if not 0 <= c < counts.size:
        raise ValidationError(f"class index {c} out of range")
    n_c = counts[c]
    if n_c <= 0:
        raise ValidationError(f"class {c} has zero count")
    if policy.mode is AlphaMode.TWO_POINT:
        alpha = policy.alpha_head if n_c >= np.median(counts) else policy.alpha_tail
    else:
        positive = counts[counts > 0]
        lo, hi = np.log(positive.min()), np.log(positive.max())
        if hi == lo:
            alpha = policy.alpha_head
        else:
            frac = (np.log(n_c) - lo) / (hi - lo)
            alpha = policy.alpha_tail + (policy.alpha_head - policy.alpha_tail) * frac
    return float(np.clip(alpha, *policy.clamp))


def _class_slices(real: FeatureSet, syn: FeatureSet):
    if real.num_classes != syn.num_classes:
        raise ValidationError(
            f"real set has {real.num_classes} classes, synthetic set has {syn.num_classes}"
        )
    if real.dim != syn.dim:
        raise ValidationError(f"dimension mismatch: {real.dim} vs {syn.dim}")
    for c in range(real.num_classes):
        Xc = real.of_class(c)
        Yc = syn.of_class(c)
        if Xc.shape[0] == 0:
            raise ValidationError(f"class {c} is empty in the real set")
        if Yc.shape[0] == 0:
            raise ValidationError(f"class {c} is empty in the synthetic set")
        yield c, Xc, Yc


def total_discrepancy(real: FeatureSet, syn: FeatureSet, bank: FrequencyBank,
                      policy: AlphaPolicy, real_cfs=None):
    """Unweighted sum over classes of the class-wise discrepancy.

    ``real_cfs`` may hold precomputed real-class CFs on ``bank``.
    Returns ``(total, per_class)``.
    """
    counts = real.class_counts
    per_class = np.zeros(real.num_classes)
    for c, Xc, Yc in _class_slices(real, syn):
        phi_T = real_cfs[c] if real_cfs is not None else empirical_cf(Xc, bank)
        phi_S = empirical_cf(Yc, bank)
        per_class[c] = class_discrepancy(phi_T, phi_S, alpha_policy_eval(policy, counts, c))
    return float(per_class.sum()), per_class


def _grad_weights(phi_T: EmpiricalCF, phi_S: EmpiricalCF, alpha_c):
    """Per-frequency coefficients of the class-discrepancy gradient in (Re, Im) of ``phi_S``."""
    a = np.abs(phi_T.values)
    u = phi_S.values.real
    v = phi_S.values.imag
    b = np.hypot(u, v)
    safe_b = np.where(b < _PHASE_EPS, 1.0, b)
    # d|phi_S|/d(u, v) = (u, v)/|phi_S|, undefined at 0 where it is dropped
    ratio = np.where(b < _PHASE_EPS, 0.0, (2.0 - 4.0 * alpha_c) * a / safe_b)
    gu = 2.0 * alpha_c * u + ratio * u - 2.0 * (1.0 - alpha_c) * phi_T.values.real
    gv = 2.0 * alpha_c * v + ratio * v - 2.0 * (1.0 - alpha_c) * phi_T.values.imag
    return gu, gv


def _gradient_from_cfs(phi_T: EmpiricalCF, phi_S: EmpiricalCF, Y, freqs, alpha_c):
    """Gradient of the class discrepancy w.r.t. the rows of ``Y`` given both CFs."""
    gu, gv = _grad_weights(phi_T, phi_S, alpha_c)
    scale = phi_T.mass / (freqs.shape[0] * Y.shape[0])
    return scale * _backend.ecf_grad(Y, freqs, gu, gv)


def cf_and_gradient(phi_T: EmpiricalCF, Y, bank: FrequencyBank, alpha_c: float):
    """Synthetic CF and discrepancy gradient from one pass of trig evaluations.

    Keeps the ``M x L`` cos/sin tables, so meant for small synthetic sets.
    """
    Y = _as_matrix(Y, "Y")
    if Y.shape[1] != bank.dim:
        raise ValidationError(f"dimension mismatch: samples have {Y.shape[1]}, bank has {bank.dim}")
    co, si = _backend.trig(Y, bank.freqs)
    M = Y.shape[0]
    phi_S = EmpiricalCF(co.mean(axis=0) + 1j * si.mean(axis=0), bank.ident, M, bank.kernel_mass)
    _same_bank(phi_T, phi_S)
    gu, gv = _grad_weights(phi_T, phi_S, alpha_c)
    grad = (co * gv - si * gu) @ bank.freqs
    return phi_S, grad * (phi_T.mass / (bank.size * M))


def sdd_gradient(real_c, syn_c, bank: FrequencyBank, alpha_c: float) -> np.ndarray:
    """Analytic gradient of the class discrepancy with respect to each synthetic sample."""
    X = _as_matrix(real_c, "real_c")
    Y = _as_matrix(syn_c, "syn_c")
    if Y.shape[0] == 0:
        raise ValidationError("synthetic class is empty")
    phi_T = empirical_cf(X, bank)
    phi_S = empirical_cf(Y, bank)
    return _gradient_from_cfs(phi_T, phi_S, Y, bank.freqs, alpha_c)
