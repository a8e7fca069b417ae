"""Counter-based random streams.

Every random quantity in the package comes from ``philox4x64-v1``:

* a 64-bit key is derived from ``(seed, purpose, index)`` with BLAKE2b
  (digest size 8, message ``b"<seed>:<purpose>:<index>"``, little-endian);
* the key drives numpy's Philox4x64-10 bit generator with counter 0;
* raw 64-bit words are mapped to uniforms in (0, 1) as
  ``((w >> 11) + 0.5) * 2**-53``;
* normals use one Box-Muller draw per consecutive pair of uniforms
  ``sqrt(-2 log u1) * cos(2 pi u2)``.

These four rules fully specify every stream, so the outputs can be reproduced
bit-for-bit by anything that implements Philox4x64-10.
"""
from __future__ import annotations

import hashlib

import numpy as np

RNG_NAME = "philox4x64-v1"

_TWO_M53 = 2.0**-53


def derive_key(seed: int, purpose: str = "", index: int = 0) -> int:
    """Hash ``(seed, purpose, index)`` into a 64-bit Philox key."""
    msg = f"{int(seed)}:{purpose}:{int(index)}".encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


class CounterStream:
    """Sequential draws from one Philox key."""

    def __init__(self, seed: int, purpose: str = "", index: int = 0):
        self.key = derive_key(seed, purpose, index)
        self._bitgen = np.random.Philox(key=self.key)

    def raw(self, n: int) -> np.ndarray:
        return self._bitgen.random_raw(int(n)).astype(np.uint64, copy=False)

    def uniform(self, size) -> np.ndarray:
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape, dtype=np.int64))
        w = self.raw(n)
        u = ((w >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53
        return u.reshape(shape)

    def normal(self, size) -> np.ndarray:
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape, dtype=np.int64))
        u = self.uniform(2 * n).reshape(n, 2)
        z = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
        return z.reshape(shape)

    def integers(self, high: int, size) -> np.ndarray:
        """Integers in ``[0, high)`` by scaling uniforms (bias < 2**-40 for small ``high``)."""
        u = self.uniform(size)
        return np.minimum((u * high).astype(np.int64), high - 1)
