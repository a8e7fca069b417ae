"""Labeled feature sets and their on-disk formats.

Binary layout (``.sdmx``), little-endian, no padding::

    magic   4 bytes  b"SDMX"
    version u32      1
    N       u64      number of rows
    D       u64      feature dimension
    C       u64      number of classes
    N*D     f64      features, row-major
    N       u64      labels

CSV layout: header ``dim_0,...,dim_{D-1},label``; floats written with 17
significant digits.
"""
from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

FEATURES_MAGIC = b"SDMX"
FEATURES_VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")


def fmt_float(x) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """``N x D`` real features with integer class labels in ``[0, num_classes)``."""

    features: np.ndarray
    labels: np.ndarray
    num_classes: int | None = None

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise ValidationError(f"features must be N x D, got shape {X.shape}")
        y = np.asarray(self.labels)
        if y.shape != (X.shape[0],):
            raise ValidationError("labels must have one entry per feature row")
        if y.size and not np.issubdtype(y.dtype, np.integer):
            if not np.all(y == np.round(y)):
                raise ValidationError("labels must be integers")
        y = y.astype(np.int64)
        if not np.all(np.isfinite(X)):
            raise ValidationError("features contain non-finite values")
        C = self.num_classes
        if C is None:
            C = int(y.max()) + 1 if y.size else 0
        if y.size and (y.min() < 0 or y.max() >= C):
            raise ValidationError(f"labels must lie in [0, {C})")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "num_classes", int(C))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)

    def of_class(self, c: int) -> np.ndarray:
        return self.features[self.labels == c]

    def with_features(self, features) -> "FeatureSet":
        return FeatureSet(features, self.labels, self.num_classes)

    def __eq__(self, other):
        if not isinstance(other, FeatureSet):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.features.shape == other.features.shape
            and self.features.tobytes() == other.features.tobytes()
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = object.__hash__

    # -- serialization -------------------------------------------------

    def to_bytes(self) -> bytes:
        N, D = self.features.shape
        head = _HEADER.pack(FEATURES_MAGIC, FEATURES_VERSION, N, D, self.num_classes)
        return head + self.features.astype("<f8").tobytes() + self.labels.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "FeatureSet":
        if len(data) < _HEADER.size:
            raise ValidationError("truncated feature file")
        magic, version, N, D, C = _HEADER.unpack_from(data)
        if magic != FEATURES_MAGIC:
            raise ValidationError(f"bad magic {magic!r}, expected {FEATURES_MAGIC!r}")
        if version != FEATURES_VERSION:
            raise ValidationError(f"unsupported feature file version {version}")
        off = _HEADER.size
        if len(data) != off + 8 * N * D + 8 * N:
            raise ValidationError("feature file payload size does not match header")
        X = np.frombuffer(data, dtype="<f8", count=N * D, offset=off).reshape(N, D)
        y = np.frombuffer(data, dtype="<u8", count=N, offset=off + 8 * N * D)
        return cls(X.astype(np.float64), y.astype(np.int64), int(C))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"dim_{d}" for d in range(self.dim)] + ["label"])
        for row, lab in zip(self.features, self.labels):
            w.writerow([fmt_float(v) for v in row] + [int(lab)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, num_classes: int | None = None) -> "FeatureSet":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValidationError("empty CSV")
        header = rows[0]
        if not header or header[-1] != "label":
            raise ValidationError("CSV header must end with 'label'")
        D = len(header) - 1
        body = [r for r in rows[1:] if r]
        X = np.array([[float(v) for v in r[:D]] for r in body], dtype=np.float64).reshape(len(body), D)
        y = np.array([int(r[D]) for r in body], dtype=np.int64)
        return cls(X, y, num_classes)

    def save(self, path):
        path = str(path)
        if path.endswith(".csv"):
            with open(path, "w", newline="") as fh:
                fh.write(self.to_csv())
        else:
            with open(path, "wb") as fh:
                fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "FeatureSet":
        path = str(path)
        if path.endswith(".csv"):
            with open(path) as fh:
                return cls.from_csv(fh.read())
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())
