"""Class-wise average accuracy and its seen/unseen device decomposition.

The headline metric averages per-class accuracies with equal class
weight, so a skewed test set cannot hide weak classes.  A class with no
test samples makes the metric undefined and raises instead of skipping.
Device-subset accuracies reuse the same rule restricted to the samples
from that subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.types import Dataset
from ..nn.model import SceneModel


def class_wise_accuracy(
    predictions: np.ndarray, labels: np.ndarray, n_classes: int
) -> tuple[float, np.ndarray]:
    """Mean of per-class accuracies; every class must appear in labels."""
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.shape != labels.shape or predictions.ndim != 1:
        raise ValueError("predictions and labels must be equal-length 1-D arrays")
    if n_classes < 1:
        raise ValueError("n_classes must be at least 1")
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ValueError("labels contain values outside [0, n_classes)")

    counts = np.bincount(labels, minlength=n_classes)
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise ValueError(
            f"class {int(missing[0])} has no samples; class-wise accuracy is undefined"
        )
    correct = np.bincount(labels[predictions == labels], minlength=n_classes)
    per_class = correct / counts
    return float(per_class.mean()), per_class


def _classwise_over_present(
    predictions: np.ndarray, labels: np.ndarray, n_classes: int
) -> float:
    """Class-wise accuracy averaged over the classes present in labels."""
    counts = np.bincount(labels, minlength=n_classes)
    present = counts > 0
    if not present.any():
        raise ValueError("no samples to evaluate")
    correct = np.bincount(labels[predictions == labels], minlength=n_classes)
    return float((correct[present] / counts[present]).mean())


def confusion_matrix(
    predictions: np.ndarray, labels: np.ndarray, n_classes: int
) -> np.ndarray:
    m = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(m, (labels, predictions), 1)
    return m


@dataclass
class EvalReport:
    overall_classwise_acc: float
    per_class_acc: np.ndarray
    per_device_acc: np.ndarray
    seen_acc: float | None
    unseen_acc: float | None
    confusion: np.ndarray
    n_evaluated: int

    def validate(self) -> None:
        if np.any(self.per_class_acc < 0) or np.any(self.per_class_acc > 1):
            raise ValueError("per-class accuracies must lie in [0, 1]")
        if abs(self.overall_classwise_acc - float(self.per_class_acc.mean())) > 1e-12:
            raise ValueError("overall accuracy must equal the mean of per-class accuracies")
        if int(self.confusion.sum()) != self.n_evaluated:
            raise ValueError("confusion matrix total must equal n_evaluated")


def report_from_predictions(
    predictions: np.ndarray,
    labels: np.ndarray,
    devices: np.ndarray,
    n_classes: int,
    n_devices: int,
    seen_devices: tuple[int, ...],
    unseen_devices: tuple[int, ...],
) -> EvalReport:
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    devices = np.asarray(devices, dtype=np.int64)
    overall, per_class = class_wise_accuracy(predictions, labels, n_classes)

    per_device = np.full(n_devices, np.nan)
    hit = predictions == labels
    for d in range(n_devices):
        mask = devices == d
        if mask.any():
            per_device[d] = float(hit[mask].mean())

    def subset_acc(device_ids: tuple[int, ...]) -> float | None:
        mask = np.isin(devices, device_ids)
        if not mask.any():
            return None
        return _classwise_over_present(predictions[mask], labels[mask], n_classes)

    report = EvalReport(
        overall_classwise_acc=overall,
        per_class_acc=per_class,
        per_device_acc=per_device,
        seen_acc=subset_acc(seen_devices),
        unseen_acc=subset_acc(unseen_devices),
        confusion=confusion_matrix(predictions, labels, n_classes),
        n_evaluated=int(labels.size),
    )
    report.validate()
    return report


def evaluate(model: SceneModel, test: Dataset) -> EvalReport:
    """Score a trained model on a test split; pure and order-independent."""
    if model.head.output_dim != test.n_scenes:
        raise ValueError(
            f"model predicts {model.head.output_dim} classes "
            f"but the dataset has {test.n_scenes}"
        )
    predictions = model.predict(test.feature_matrix())
    return report_from_predictions(
        predictions,
        test.scene_labels(),
        test.device_labels(),
        n_classes=test.n_scenes,
        n_devices=test.n_devices,
        seen_devices=test.seen_devices,
        unseen_devices=test.unseen_devices,
    )
