"""Long-tailed toy datasets and real-set feature normalization."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .features import FeatureSet
from .rng import CounterStream

SCALE_FLOOR = 1e-8


def _default_means(num_classes: int, dim: int) -> list[list[np.ndarray]]:
    """Two components per class, classes spread on a circle of radius 4."""
    out = []
    for c in range(num_classes):
        ang = 2.0 * math.pi * c / max(num_classes, 1)
        center = np.zeros(dim)
        tangent = np.zeros(dim)
        center[0] = 4.0 * math.cos(ang)
        tangent[0] = -math.sin(ang)
        if dim > 1:
            center[1] = 4.0 * math.sin(ang)
            tangent[1] = math.cos(ang)
        out.append([center + 0.8 * tangent, center - 0.8 * tangent])
    return out


@dataclass(frozen=True)
class LongTailSpec:
    """Exponentially decaying class sizes with a Gaussian mixture per class.

    ``means[c]`` lists the component means of class ``c``; ``weights[c]`` the
    matching mixture weights (uniform when omitted). Every component has
    covariance ``scale**2 * I``.
    """

    num_classes: int = 5
    base_count: int = 200
    beta: float = 100.0
    dim: int = 2
    scale: float = 0.5
    means: tuple = field(default=None)
    weights: tuple = field(default=None)

    def __post_init__(self):
        if self.num_classes < 1:
            raise ValidationError("data.classes must be >= 1")
        if self.base_count < 1:
            raise ValidationError("data.base must be >= 1")
        if not self.beta >= 1:
            raise ValidationError(f"data.beta must be >= 1, got {self.beta}")
        if self.dim < 1:
            raise ValidationError("data.dim must be >= 1")
        if self.num_classes < 2 and self.beta > 1:
            raise ValidationError("an imbalance factor beta > 1 needs at least two classes")
        means = self.means
        if means is None:
            means = _default_means(self.num_classes, self.dim)
        means = tuple(tuple(np.asarray(m, dtype=np.float64) for m in comps) for comps in means)
        if len(means) != self.num_classes:
            raise ValidationError(f"got means for {len(means)} classes, expected {self.num_classes}")
        for c, comps in enumerate(means):
            if len(comps) < 1:
                raise ValidationError(f"class {c} has no mixture component")
            for m in comps:
                if m.shape != (self.dim,):
                    raise ValidationError(f"class {c} component mean has shape {m.shape}, expected ({self.dim},)")
        weights = self.weights
        if weights is None:
            weights = tuple(tuple([1.0 / len(comps)] * len(comps)) for comps in means)
        weights = tuple(tuple(float(w) for w in ws) for ws in weights)
        for c, (ws, comps) in enumerate(zip(weights, means)):
            if len(ws) != len(comps) or any(w < 0 for w in ws) or sum(ws) <= 0:
                raise ValidationError(f"class {c} has invalid mixture weights {ws}")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "weights", weights)


def longtail_counts(spec: LongTailSpec) -> np.ndarray:
    """Class sizes ``round(base * beta**(-c/(C-1)))``, floored at 1.

    Head class gets exactly ``base``, tail class ``round(base / beta)``.
    """
    C = spec.num_classes
    if C < 2:
        if spec.beta > 1:
            raise ValidationError("an imbalance factor beta > 1 needs at least two classes")
        return np.array([spec.base_count], dtype=np.int64)
    c = np.arange(C)
    raw = spec.base_count * np.power(float(spec.beta), -c / (C - 1))
    # half-up rounding, not banker's
    counts = np.floor(raw + 0.5).astype(np.int64)
    counts[0] = spec.base_count
    return np.maximum(counts, 1)


def generate_mixture_dataset(spec: LongTailSpec, seed: int) -> FeatureSet:
    """Draw ``longtail_counts(spec)[c]`` points from each class's Gaussian mixture."""
    if not spec.scale > 0:
        raise ValidationError(f"covariance scale must be positive, got {spec.scale}")
    counts = longtail_counts(spec)
    feats = []
    labels = []
    for c, n in enumerate(counts):
        stream = CounterStream(seed, "data", c)
        ws = np.asarray(spec.weights[c], dtype=np.float64)
        cdf = np.cumsum(ws / ws.sum())
        comp = np.minimum(np.searchsorted(cdf, stream.uniform(n), side="right"), len(ws) - 1)
        centers = np.stack(spec.means[c])[comp]
        feats.append(centers + spec.scale * stream.normal((n, spec.dim)))
        labels.append(np.full(n, c, dtype=np.int64))
    return FeatureSet(np.vstack(feats), np.concatenate(labels), spec.num_classes)


class NormalizationSource(enum.Enum):
    REAL_ONLY = "real_only"


@dataclass(frozen=True, eq=False)
class NormalizationStats:
    shift: np.ndarray
    scale: np.ndarray
    source: NormalizationSource = NormalizationSource.REAL_ONLY

    def apply(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.shift) / self.scale

    def invert(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=np.float64) * self.scale + self.shift


def normalize_features(real: FeatureSet, syn: FeatureSet):
    """Standardize both sets per dimension using statistics of ``real`` only."""
    if real.n == 0 or syn.n == 0:
        raise ValidationError("cannot normalize an empty feature set")
    if real.dim != syn.dim:
        raise ValidationError(f"dimension mismatch: {real.dim} vs {syn.dim}")
    shift = real.features.mean(axis=0)
    scale = np.maximum(real.features.std(axis=0), SCALE_FLOOR)
    stats = NormalizationStats(shift, scale)
    return (
        real.with_features(stats.apply(real.features)),
        syn.with_features(stats.apply(syn.features)),
        stats,
    )
