"""Deterministic, hierarchical random streams.

All randomness in the package flows from a single 64-bit seed through named
substreams.  A stream is identified by ``(seed, path)`` where ``path`` is a
tuple of integers; string labels are hashed to integers with SHA-256 so the
mapping is stable across runs, platforms and Python hash randomization.
Distinct paths map to distinct ``SeedSequence`` spawn keys, which NumPy
guarantees to be statistically independent.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


def _key_to_int(key: int | str) -> int:
    if isinstance(key, int):
        if key < 0:
            raise ValueError("substream keys must be nonnegative")
        return key
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class RandomStream:
    """A reproducible random source addressed by seed and substream path."""

    seed: int
    path: tuple[int, ...] = field(default_factory=tuple)

    def child(self, *keys: int | str) -> "RandomStream":
        """Derive an independent substream named by ``keys``."""
        return RandomStream(self.seed, self.path + tuple(_key_to_int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        """Fresh generator; repeated calls restart the same sequence."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))
