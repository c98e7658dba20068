"""Batch composition and sample-id streams.

``BatchPlan`` fixes the mixed-batch composition: exactly
``floor(ratio * B)`` invariant samples and the remainder specific, for
every batch.  ``CyclicSampler`` yields ids without replacement,
reshuffling each time the pool is exhausted, so coverage is even at the
epoch scale while batch sizes stay exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class BatchPlan:
    batch_size: int
    n_invariant: int
    n_specific: int

    @classmethod
    def from_batch_size(cls, batch_size: int, invariant_ratio: float = 0.8) -> "BatchPlan":
        if batch_size < 1:
            raise ValueError("batch size must be at least 1")
        if not (0.0 < invariant_ratio < 1.0):
            raise ValueError("invariant_ratio must be in (0, 1)")
        # Exact floor(ratio * B) via rational arithmetic; float rounding
        # must not change the composition.
        n_invariant = int(Fraction(invariant_ratio).limit_denominator(10**6) * batch_size)
        if n_invariant == 0:
            warnings.warn(
                f"batch size {batch_size} gives 0 invariant samples per mixed batch; "
                "mixed batches will contain only specific samples",
                stacklevel=2,
            )
        return cls(
            batch_size=batch_size,
            n_invariant=n_invariant,
            n_specific=batch_size - n_invariant,
        )


class CyclicSampler:
    """Infinite without-replacement id stream with reshuffle on exhaustion."""

    def __init__(self, ids: list[int], rng: np.random.Generator):
        if not ids:
            raise ValueError("cannot sample from an empty id pool")
        self._ids = np.asarray(ids, dtype=np.int64)
        self._rng = rng
        self._order = self._rng.permutation(self._ids.size)
        self._pos = 0

    def __len__(self) -> int:
        return int(self._ids.size)

    @property
    def rng(self) -> np.random.Generator:
        return self._rng

    def draw(self, k: int) -> np.ndarray:
        """Next k ids from the stream."""
        out = np.empty(k, dtype=np.int64)
        filled = 0
        while filled < k:
            take = min(k - filled, self._order.size - self._pos)
            out[filled : filled + take] = self._ids[self._order[self._pos : self._pos + take]]
            filled += take
            self._pos += take
            if self._pos == self._order.size:
                self._order = self._rng.permutation(self._ids.size)
                self._pos = 0
        return out
