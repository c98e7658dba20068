from .scoring import (
    DevicePosterior,
    EntropyScore,
    device_posteriors,
    entropy,
    posterior_entropy,
    score_dataset,
)
from .partition import (
    CurriculumPartition,
    build_partition,
    load_partition,
    save_partition,
)
from .train import ProbeSettings, train_domain_classifier, warm_up_scene_model

__all__ = [
    "DevicePosterior",
    "EntropyScore",
    "entropy",
    "posterior_entropy",
    "device_posteriors",
    "score_dataset",
    "CurriculumPartition",
    "build_partition",
    "save_partition",
    "load_partition",
    "ProbeSettings",
    "train_domain_classifier",
    "warm_up_scene_model",
]
