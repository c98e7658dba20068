"""Per-sample device-ambiguity scores.

A frozen extractor and a trained device head map each sample to a
posterior over seen devices; the Shannon entropy of that posterior (in
nats) is the sample's ambiguity score.  High entropy means the device
classifier cannot tell where the sample was recorded, i.e. the sample
carries little device-specific signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.types import Dataset
from ..nn.losses import softmax
from ..nn.network import Network

POSTERIOR_TOL = 1e-9


@dataclass
class DevicePosterior:
    sample_id: int
    probs: np.ndarray

    def validate(self) -> None:
        p = self.probs
        if p.ndim != 1 or p.size == 0:
            raise ValueError("posterior must be a non-empty vector")
        if np.any(p < 0) or abs(float(p.sum()) - 1.0) > POSTERIOR_TOL:
            raise ValueError(f"posterior for sample {self.sample_id} is not a distribution")


@dataclass(frozen=True)
class EntropyScore:
    sample_id: int
    value: float


def entropy(probs: np.ndarray) -> float:
    """Shannon entropy -sum p ln p in nats, with 0 * ln 0 taken as 0."""
    p = np.asarray(probs, dtype=np.float64)
    terms = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    return float(-terms.sum())


def posterior_entropy(posterior: DevicePosterior) -> EntropyScore:
    posterior.validate()
    return EntropyScore(sample_id=posterior.sample_id, value=entropy(posterior.probs))


def device_posteriors(
    extractor: Network, device_head: Network, dataset: Dataset
) -> list[DevicePosterior]:
    """softmax(device_head(extractor(x))) for every sample, id-keyed."""
    probs = softmax(device_head.forward(extractor.forward(dataset.feature_matrix())))
    return [
        DevicePosterior(sample_id=s.id, probs=probs[i])
        for i, s in enumerate(dataset.samples)
    ]


def score_dataset(
    extractor: Network, device_head: Network, dataset: Dataset
) -> list[EntropyScore]:
    """One entropy score per sample; pure in (networks, dataset)."""
    return [posterior_entropy(p) for p in device_posteriors(extractor, device_head, dataset)]
