"""Kernel definitions, Gram matrices and spectral (Bochner) sampling.

Supported kernels, with ``r = x - y``:

=========== =============================== ========================================
kind        k(x, y)                         spectral distribution of the frequencies
=========== =============================== ========================================
rbf         exp(-gamma |r|^2)               N(0, 2 gamma I)
laplace     exp(-gamma |r|_1)               independent Cauchy(0, gamma) per coordinate
cosine      cos(omega |r|)                  uniform direction, radius omega
linear      x.y                             (none)
polynomial  (x.y + offset)^degree           (none)
sigmoid     tanh(slope x.y + offset)        (none)
=========== =============================== ========================================

The Laplace kernel uses the L1 distance so that its Gram form and its
product-Cauchy spectral form describe the same function.
"""
from __future__ import annotations

import enum
import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import UnsupportedKernelError, ValidationError
from .rng import CounterStream


class KernelKind(enum.Enum):
    RBF = "rbf"
    LAPLACE = "laplace"
    LINEAR = "linear"
    POLYNOMIAL = "polynomial"
    SIGMOID = "sigmoid"
    COSINE = "cosine"

    @property
    def code(self) -> int:
        return _KIND_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "KernelKind":
        for kind, c in _KIND_CODES.items():
            if c == code:
                return kind
        raise ValidationError(f"unknown kernel kind code {code}")


_KIND_CODES = {
    KernelKind.RBF: 0,
    KernelKind.LAPLACE: 1,
    KernelKind.LINEAR: 2,
    KernelKind.POLYNOMIAL: 3,
    KernelKind.SIGMOID: 4,
    KernelKind.COSINE: 5,
}

_UNIVERSAL = {KernelKind.RBF, KernelKind.LAPLACE}
_SHIFT_INVARIANT = {KernelKind.RBF, KernelKind.LAPLACE, KernelKind.COSINE}


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind = KernelKind.RBF
    gamma: float = 2.0
    degree: int = 2
    offset: float = 1.0
    slope: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                object.__setattr__(self, "kind", KernelKind(self.kind.lower()))
            except ValueError:
                raise ValidationError(f"unknown kernel kind {self.kind!r}") from None
        if self.kind in (KernelKind.RBF, KernelKind.LAPLACE):
            if not (np.isfinite(self.gamma) and self.gamma > 0):
                raise ValidationError(f"kernel.gamma must be positive, got {self.gamma}")
        if self.kind is KernelKind.POLYNOMIAL and (int(self.degree) != self.degree or self.degree < 1):
            raise ValidationError(f"kernel.degree must be a positive integer, got {self.degree}")
        if self.kind is KernelKind.COSINE and not self.omega > 0:
            raise ValidationError(f"kernel.omega must be positive, got {self.omega}")

    def is_universal(self) -> bool:
        return self.kind in _UNIVERSAL

    def is_shift_invariant(self) -> bool:
        return self.kind in _SHIFT_INVARIANT

    def to_config(self) -> dict[str, str]:
        out = {"kernel.kind": self.kind.value}
        if self.kind in (KernelKind.RBF, KernelKind.LAPLACE):
            out["kernel.gamma"] = repr(float(self.gamma))
        elif self.kind is KernelKind.POLYNOMIAL:
            out["kernel.degree"] = str(int(self.degree))
            out["kernel.offset"] = repr(float(self.offset))
        elif self.kind is KernelKind.SIGMOID:
            out["kernel.slope"] = repr(float(self.slope))
            out["kernel.offset"] = repr(float(self.offset))
        elif self.kind is KernelKind.COSINE:
            out["kernel.omega"] = repr(float(self.omega))
        return out

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.to_config().items())

    @classmethod
    def from_config(cls, items: dict[str, str]) -> "KernelSpec":
        kw = {}
        for key, value in items.items():
            name = key.split(".", 1)[1] if key.startswith("kernel.") else key
            if name == "kind":
                kw["kind"] = value
            elif name == "degree":
                kw["degree"] = int(value)
            elif name in ("gamma", "offset", "slope", "omega"):
                kw[name] = float(value)
            else:
                raise ValidationError(f"unknown key {key!r}")
        return cls(**kw)

    @classmethod
    def from_text(cls, text: str) -> "KernelSpec":
        items = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                key, _, value = line.partition("=")
                items[key.strip()] = value.strip()
        return cls.from_config(items)


def _as_matrix(a, name="X") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ValidationError(f"{name} must be a 2-D sample matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite values")
    return a


def _check_pair(X, Y):
    X = _as_matrix(X, "X")
    Y = _as_matrix(Y, "Y")
    if X.shape[1] != Y.shape[1]:
        raise ValidationError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    return X, Y


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """k(x, y) for two vectors of the same length."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValidationError(f"dimension mismatch: {x.size} vs {y.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("non-finite input")
    kind = spec.kind
    r = x - y
    if kind is KernelKind.RBF:
        return float(np.exp(-spec.gamma * np.dot(r, r)))
    if kind is KernelKind.LAPLACE:
        return float(np.exp(-spec.gamma * np.sum(np.abs(r))))
    if kind is KernelKind.COSINE:
        return float(np.cos(spec.omega * np.sqrt(np.dot(r, r))))
    dot = float(np.dot(x, y))
    if kind is KernelKind.LINEAR:
        return dot
    if kind is KernelKind.POLYNOMIAL:
        return float((dot + spec.offset) ** int(spec.degree))
    return float(np.tanh(spec.slope * dot + spec.offset))


def gram_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """Matrix of k(X_i, Y_j)."""
    X, Y = _check_pair(X, Y)
    kind = spec.kind
    if kind is KernelKind.RBF:
        return np.exp(-spec.gamma * cdist(X, Y, "sqeuclidean"))
    if kind is KernelKind.LAPLACE:
        return np.exp(-spec.gamma * cdist(X, Y, "cityblock"))
    if kind is KernelKind.COSINE:
        return np.cos(spec.omega * cdist(X, Y, "euclidean"))
    dots = X @ Y.T
    if kind is KernelKind.LINEAR:
        return dots
    if kind is KernelKind.POLYNOMIAL:
        return (dots + spec.offset) ** int(spec.degree)
    return np.tanh(spec.slope * dots + spec.offset)


def kernel_mass(spec: KernelSpec) -> float:
    """Total spectral mass k(0) of a shift-invariant kernel."""
    if not spec.is_shift_invariant():
        raise UnsupportedKernelError(f"{spec.kind.value} kernel has no spectral measure")
    # exp(0) for rbf/laplace, cos(0) for cosine
    return 1.0


BANK_MAGIC = b"SDMF"
BANK_VERSION = 1
_BANK_HEADER = struct.Struct("<4sIQQQBd")


@dataclass(frozen=True, eq=False)
class FrequencyBank:
    """``L`` frequency vectors drawn from a kernel's normalized spectral measure."""

    freqs: np.ndarray
    kernel_mass: float
    seed: int
    source_kind: KernelKind
    ident: str = field(default="")

    def __post_init__(self):
        f = np.ascontiguousarray(self.freqs, dtype=np.float64)
        if f.ndim != 2 or f.shape[0] < 1:
            raise ValidationError("frequency bank needs at least one frequency row")
        if not np.all(np.isfinite(f)):
            raise ValidationError("frequency bank contains non-finite rows")
        f.setflags(write=False)
        object.__setattr__(self, "freqs", f)
        if not self.ident:
            digest = hashlib.blake2b(f.tobytes(), digest_size=8)
            digest.update(struct.pack("<d", float(self.kernel_mass)))
            object.__setattr__(self, "ident", digest.hexdigest())

    @property
    def size(self) -> int:
        return self.freqs.shape[0]

    @property
    def dim(self) -> int:
        return self.freqs.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FrequencyBank):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.source_kind is other.source_kind
            and self.kernel_mass == other.kernel_mass
            and self.freqs.shape == other.freqs.shape
            and self.freqs.tobytes() == other.freqs.tobytes()
        )

    __hash__ = object.__hash__

    def to_bytes(self) -> bytes:
        L, D = self.freqs.shape
        head = _BANK_HEADER.pack(BANK_MAGIC, BANK_VERSION, L, D, self.seed & 0xFFFFFFFFFFFFFFFF,
                                 self.source_kind.code, float(self.kernel_mass))
        return head + self.freqs.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "FrequencyBank":
        if len(data) < _BANK_HEADER.size:
            raise ValidationError("truncated frequency bank file")
        magic, version, L, D, seed, code, mass = _BANK_HEADER.unpack_from(data)
        if magic != BANK_MAGIC:
            raise ValidationError(f"bad magic {magic!r}, expected {BANK_MAGIC!r}")
        if version != BANK_VERSION:
            raise ValidationError(f"unsupported bank version {version}")
        body = data[_BANK_HEADER.size:]
        if len(body) != 8 * L * D:
            raise ValidationError("frequency bank payload size does not match header")
        freqs = np.frombuffer(body, dtype="<f8").reshape(L, D).astype(np.float64)
        return cls(freqs, mass, seed, KernelKind.from_code(code))

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "FrequencyBank":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def spectral_sample(spec: KernelSpec, L: int, D: int, seed: int, purpose: str = "bank",
                    index: int = 0) -> FrequencyBank:
    """Draw ``L`` frequencies in ``D`` dimensions from the kernel's spectral distribution.

    The stream is keyed on ``(seed, purpose, index)``; see :mod:`specmatch.rng`.
    """
    if not spec.is_shift_invariant():
        raise UnsupportedKernelError(f"{spec.kind.value} kernel has no spectral distribution to sample")
    if L < 1 or D < 1:
        raise ValidationError(f"need L >= 1 and D >= 1, got L={L}, D={D}")
    stream = CounterStream(seed, f"{purpose}:{spec.kind.value}", index)
    if spec.kind is KernelKind.RBF:
        freqs = np.sqrt(2.0 * spec.gamma) * stream.normal((L, D))
    elif spec.kind is KernelKind.LAPLACE:
        u = stream.uniform((L, D))
        freqs = spec.gamma * np.tan(np.pi * (u - 0.5))
    else:
        z = stream.normal((L, D))
        norms = np.linalg.norm(z, axis=1, keepdims=True)
        freqs = spec.omega * z / norms
    return FrequencyBank(freqs, kernel_mass(spec), int(seed), spec.kind)
