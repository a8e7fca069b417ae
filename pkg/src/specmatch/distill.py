"""Gradient-descent distillation of a labeled feature set into a few points per class."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import NumericalError, ValidationError
from .features import FeatureSet
from .kernels import FrequencyBank, KernelKind, KernelSpec, spectral_sample
from .rng import CounterStream
from .spectral import (
    AlphaPolicy,
    alpha_policy_eval,
    cf_and_gradient,
    class_discrepancy,
    empirical_cf,
    total_discrepancy,
)


class InitStrategy(enum.Enum):
    RANDOM_REAL = "random_real"
    CLASS_MEAN_JITTER = "class_mean_jitter"


@dataclass(frozen=True)
class DistillConfig:
    ipc: int = 10
    iterations: int = 2000
    learning_rate: float = 2.0
    kernel: KernelSpec = field(default_factory=KernelSpec)
    bank_size: int = 1024
    policy: AlphaPolicy = field(default_factory=AlphaPolicy)
    master_seed: int = 0
    freeze_bank: bool = False
    init: InitStrategy = InitStrategy.CLASS_MEAN_JITTER
    jitter: float = 0.1
    verify_bank_size: int = 50000
    verify_every: int = 100

    def __post_init__(self):
        if isinstance(self.init, str):
            try:
                object.__setattr__(self, "init", InitStrategy(self.init.lower().replace("-", "_")))
            except ValueError:
                raise ValidationError(f"unknown init strategy {self.init!r}") from None
        if self.ipc < 1:
            raise ValidationError("ipc must be >= 1")
        if self.iterations < 0:
            raise ValidationError("iterations must be >= 0")
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")
        if self.bank_size < 1 or self.verify_bank_size < 1:
            raise ValidationError("bank sizes must be >= 1")
        if self.verify_every < 1:
            raise ValidationError("verify_every must be >= 1")
        if self.jitter < 0:
            raise ValidationError("jitter must be >= 0")
        if not self.kernel.is_shift_invariant():
            raise ValidationError(f"distillation needs a shift-invariant kernel, got {self.kernel.kind.value}")

    @property
    def gamma(self) -> float:
        return self.kernel.gamma


@dataclass
class DistillResult:
    synthetic: FeatureSet
    trace_iterations: list[int]
    objective_trace: list[float]
    trace_per_class: list[np.ndarray]
    per_class_final: np.ndarray
    diversity: np.ndarray
    realism: np.ndarray
    alphas: np.ndarray
    train_objective: list[float] = field(default_factory=list)
    grad_check: tuple = ()


@dataclass
class SyntheticReport:
    class_counts_real: np.ndarray
    ipc: np.ndarray
    alphas: np.ndarray
    d_c: np.ndarray
    diversity: np.ndarray
    realism: np.ndarray

    @property
    def total(self) -> float:
        return float(self.d_c.sum())


def init_synthetic(real: FeatureSet, ipc: int, strategy=InitStrategy.CLASS_MEAN_JITTER,
                   seed: int = 0, jitter: float = 0.1) -> FeatureSet:
    """Initial synthetic set with exactly ``ipc`` points per class."""
    strategy = InitStrategy(strategy) if isinstance(strategy, str) else strategy
    if ipc < 1:
        raise ValidationError("ipc must be >= 1")
    feats = []
    for c in range(real.num_classes):
        Xc = real.of_class(c)
        if Xc.shape[0] == 0:
            raise ValidationError(f"class {c} is empty in the real set")
        stream = CounterStream(seed, "init", c)
        if strategy is InitStrategy.RANDOM_REAL:
            if Xc.shape[0] >= ipc:
                idx = np.argsort(stream.uniform(Xc.shape[0]), kind="stable")[:ipc]
            else:
                idx = stream.integers(Xc.shape[0], ipc)
            feats.append(Xc[idx])
        else:
            feats.append(Xc.mean(axis=0) + jitter * stream.normal((ipc, real.dim)))
    labels = np.repeat(np.arange(real.num_classes), ipc)
    return FeatureSet(np.vstack(feats), labels, real.num_classes)


def training_bank(config: DistillConfig, dim: int, iteration: int) -> FrequencyBank:
    index = 0 if config.freeze_bank else iteration
    return spectral_sample(config.kernel, config.bank_size, dim, config.master_seed, "train", index)


def verification_bank(config: DistillConfig, dim: int) -> FrequencyBank:
    return spectral_sample(config.kernel, config.verify_bank_size, dim, config.master_seed, "verify", 0)


def distill_step(state: FeatureSet, real: FeatureSet, config: DistillConfig, iteration: int,
                 bank: FrequencyBank | None = None, real_cfs=None):
    """One SGD step on the class-aware objective.

    Returns ``(updated_state, objective, per_class)`` where the objective is
    evaluated on the step's bank before the update.
    """
    if bank is None:
        bank = training_bank(config, real.dim, iteration)
    counts = real.class_counts
    Y = state.features.copy()
    per_class = np.zeros(real.num_classes)
    for c in range(real.num_classes):
        rows = state.labels == c
        Yc = state.features[rows]
        if Yc.shape[0] == 0:
            raise ValidationError(f"class {c} is empty in the synthetic set")
        if real_cfs is not None:
            phi_T = real_cfs[c]
        else:
            Xc = real.of_class(c)
            if Xc.shape[0] == 0:
                raise ValidationError(f"class {c} is empty in the real set")
            phi_T = empirical_cf(Xc, bank)
        alpha = alpha_policy_eval(config.policy, counts, c)
        phi_S, grad = cf_and_gradient(phi_T, Yc, bank, alpha)
        per_class[c] = class_discrepancy(phi_T, phi_S, alpha)
        if not np.all(np.isfinite(grad)):
            raise NumericalError(f"non-finite gradient for class {c} at iteration {iteration}")
        Y[rows] = Yc - config.learning_rate * grad
    return state.with_features(Y), float(per_class.sum()), per_class


def evaluate_synthetic(real: FeatureSet, syn: FeatureSet, bank: FrequencyBank,
                       policy: AlphaPolicy, real_cfs=None) -> SyntheticReport:
    """Per-class discrepancy plus diversity and realism proxies.

    diversity: mean pairwise distance between a class's synthetic points (0 for one point).
    realism: mean distance from each synthetic point to its nearest real point of the class.
    """
    _, d_c = total_discrepancy(real, syn, bank, policy, real_cfs=real_cfs)
    counts = real.class_counts
    C = real.num_classes
    diversity = np.zeros(C)
    realism = np.zeros(C)
    alphas = np.zeros(C)
    for c in range(C):
        Yc = syn.of_class(c)
        Xc = real.of_class(c)
        diversity[c] = pdist(Yc).mean() if Yc.shape[0] > 1 else 0.0
        realism[c] = cdist(Yc, Xc).min(axis=1).mean()
        alphas[c] = alpha_policy_eval(policy, counts, c)
    return SyntheticReport(counts, syn.class_counts, alphas, d_c, diversity, realism)


def spot_check_gradient(real: FeatureSet, syn: FeatureSet, config: DistillConfig,
                        bank: FrequencyBank, h: float = 1e-5):
    """Compare one analytic gradient entry with a central difference.

    The (class, point, dimension) triple is drawn from the master seed.
    Returns ``(c, j, d, analytic, numeric)``; raises NumericalError on mismatch.
    """
    s = CounterStream(config.master_seed, "grad-check")
    c = int(s.integers(real.num_classes, 1)[0])
    j = int(s.integers(config.ipc, 1)[0])
    d = int(s.integers(real.dim, 1)[0])
    alpha = alpha_policy_eval(config.policy, real.class_counts, c)
    Xc, Yc = real.of_class(c), syn.of_class(c).copy()
    phi_T = empirical_cf(Xc, bank)
    analytic = cf_and_gradient(phi_T, Yc, bank, alpha)[1][j, d]
    vals = []
    for step in (h, -h):
        Z = Yc.copy()
        Z[j, d] += step
        vals.append(class_discrepancy(phi_T, empirical_cf(Z, bank), alpha))
    numeric = (vals[0] - vals[1]) / (2 * h)
    if not abs(analytic - numeric) <= 1e-7 + 1e-4 * abs(numeric):
        raise NumericalError(
            f"gradient check failed for class {c}, point {j}, dim {d}: "
            f"analytic {analytic:.6g} vs finite difference {numeric:.6g}"
        )
    return c, j, d, float(analytic), float(numeric)


def run_distillation(real: FeatureSet, config: DistillConfig, log=None) -> DistillResult:
    """Run ``config.iterations`` SGD steps, tracing the objective on a frozen verification bank."""
    syn = init_synthetic(real, config.ipc, config.init, config.master_seed, config.jitter)
    vbank = verification_bank(config, real.dim)
    vcfs = [empirical_cf(real.of_class(c), vbank) for c in range(real.num_classes)]

    frozen = training_bank(config, real.dim, 0) if config.freeze_bank else None
    frozen_cfs = (
        [empirical_cf(real.of_class(c), frozen) for c in range(real.num_classes)] if frozen else None
    )

    its, trace, trace_pc, train = [], [], [], []

    def record(i, state):
        total, pc = total_discrepancy(real, state, vbank, config.policy, real_cfs=vcfs)
        its.append(i)
        trace.append(total)
        trace_pc.append(pc)
        if log is not None:
            log(i, total)

    check = spot_check_gradient(real, syn, config, frozen or training_bank(config, real.dim, 0))
    record(0, syn)
    for it in range(config.iterations):
        syn, obj, _ = distill_step(syn, real, config, it, bank=frozen, real_cfs=frozen_cfs)
        train.append(obj)
        done = it + 1
        if done % config.verify_every == 0 or done == config.iterations:
            record(done, syn)

    report = evaluate_synthetic(real, syn, vbank, config.policy, real_cfs=vcfs)
    return DistillResult(
        synthetic=syn,
        trace_iterations=its,
        objective_trace=trace,
        trace_per_class=trace_pc,
        per_class_final=report.d_c,
        diversity=report.diversity,
        realism=report.realism,
        alphas=report.alphas,
        train_objective=train,
        grad_check=check,
    )
