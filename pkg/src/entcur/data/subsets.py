"""Low-resource training subsets, stratified by (scene, device) and nested.

Each stratum draws ``ceil(fraction * stratum_size)`` samples (ceiling so
no stratum ever empties), taken as a prefix of one seeded per-stratum
permutation.  Prefixes of the same permutation nest, so for a fixed seed
the 5% subset is contained in the 10% subset and so on up to 100%.
"""

from __future__ import annotations

import math

from ..seeding import derive_rng
from .types import Dataset

ALLOWED_FRACTIONS = (0.05, 0.10, 0.25, 0.50, 1.00)

# Stream code for per-stratum permutations; the context is (scene, device).
_STRATUM_STREAM = 97


def subset(train: Dataset, fraction: float, seed: int) -> Dataset:
    """Stratified nested fraction of a train split, in original sample order."""
    if not any(math.isclose(fraction, f) for f in ALLOWED_FRACTIONS):
        raise ValueError(
            f"fraction {fraction} not in allowed set {ALLOWED_FRACTIONS}"
        )
    strata: dict[tuple[int, int], list[int]] = {}
    for s in train.samples:
        strata.setdefault((s.scene, s.device), []).append(s.id)

    chosen: set[int] = set()
    for (scene, device), ids in sorted(strata.items()):
        take = math.ceil(fraction * len(ids))
        rng = derive_rng(seed, _STRATUM_STREAM, scene, device)
        order = rng.permutation(len(ids))
        chosen.update(ids[i] for i in order[:take])

    picked = [s for s in train.samples if s.id in chosen]
    sub = Dataset(
        samples=picked,
        n_scenes=train.n_scenes,
        n_devices=train.n_devices,
        seen_devices=train.seen_devices,
        unseen_devices=train.unseen_devices,
        split=train.split,
    )
    sub.validate()
    return sub
