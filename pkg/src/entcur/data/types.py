"""Sample and Dataset containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Sample:
    """One feature vector with its scene label, device label and stable id."""

    id: int
    features: np.ndarray
    scene: int
    device: int

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sample):
            return NotImplemented
        return (
            self.id == other.id
            and self.scene == other.scene
            and self.device == other.device
            and np.array_equal(self.features, other.features)
        )


@dataclass
class Dataset:
    """Ordered samples plus scene/device vocabularies and the seen/unseen split.

    ``split`` is "train" or "test".  Train data may only contain seen
    devices; test data may contain both.
    """

    samples: list[Sample]
    n_scenes: int
    n_devices: int
    seen_devices: tuple[int, ...]
    unseen_devices: tuple[int, ...]
    split: str
    _feature_cache: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.n_scenes == other.n_scenes
            and self.n_devices == other.n_devices
            and self.seen_devices == other.seen_devices
            and self.unseen_devices == other.unseen_devices
            and self.split == other.split
            and self.samples == other.samples
        )

    @property
    def n_bins(self) -> int:
        return len(self.samples[0].features)

    def ids(self) -> list[int]:
        return [s.id for s in self.samples]

    def feature_matrix(self) -> np.ndarray:
        """(N, F) float64 matrix; cached after first call."""
        if self._feature_cache is None:
            self._feature_cache = np.stack([s.features for s in self.samples]).astype(np.float64)
        return self._feature_cache

    def scene_labels(self) -> np.ndarray:
        return np.array([s.scene for s in self.samples], dtype=np.int64)

    def device_labels(self) -> np.ndarray:
        return np.array([s.device for s in self.samples], dtype=np.int64)

    def by_id(self) -> dict[int, Sample]:
        return {s.id: s for s in self.samples}

    def device_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for s in self.samples:
            counts[s.device] = counts.get(s.device, 0) + 1
        return counts

    def validate(self) -> None:
        """Check every container invariant; raises ValueError on the first hole."""
        if not self.samples:
            raise ValueError("dataset is empty")
        if self.split not in ("train", "test"):
            raise ValueError(f"unknown split {self.split!r}")
        if set(self.seen_devices) & set(self.unseen_devices):
            raise ValueError("seen and unseen device sets overlap")
        n_bins = len(self.samples[0].features)
        seen = set(self.seen_devices)
        known = seen | set(self.unseen_devices)
        ids: set[int] = set()
        for s in self.samples:
            if s.id in ids:
                raise ValueError(f"duplicate sample id {s.id}")
            ids.add(s.id)
            if len(s.features) != n_bins:
                raise ValueError(f"sample {s.id}: feature length {len(s.features)} != {n_bins}")
            if not np.all(np.isfinite(s.features)):
                raise ValueError(f"sample {s.id}: non-finite features")
            if not (0 <= s.scene < self.n_scenes):
                raise ValueError(f"sample {s.id}: scene label {s.scene} out of range")
            if not (0 <= s.device < self.n_devices):
                raise ValueError(f"sample {s.id}: device label {s.device} out of range")
            if s.device not in known:
                raise ValueError(f"sample {s.id}: device {s.device} not in seen/unseen sets")
            if self.split == "train" and s.device not in seen:
                raise ValueError(f"sample {s.id}: unseen device {s.device} in train split")
