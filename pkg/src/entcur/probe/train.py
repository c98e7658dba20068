"""Training for the auxiliary device classifier and the extractor warm-up.

The device classifier is a two-layer MLP (one hidden ReLU layer, softmax
output over seen devices) trained with cross-entropy and Adam at lr
1e-4 on features from a frozen extractor.  It stops at the epoch cap or
when the training loss plateaus, whichever comes first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn.losses import batch_cross_entropy, softmax, softmax_cross_entropy_grad
from ..nn.model import SceneModel
from ..nn.network import Network
from ..nn.optim import make_optimizer
from ..training.plateau import PlateauDetector


@dataclass
class ProbeSettings:
    hidden_dim: int = 64
    learning_rate: float = 1e-4
    optimizer: str = "adam"
    epochs: int = 300
    batch_size: int = 32
    patience: int = 20
    min_relative_improvement: float = 1e-3


def _epoch_batches(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def train_domain_classifier(
    features: np.ndarray,
    device_labels: np.ndarray,
    n_devices: int,
    settings: ProbeSettings,
    init_rng: np.random.Generator,
    shuffle_rng: np.random.Generator,
) -> tuple[Network, float]:
    """Train the device head on frozen features; returns (head, final accuracy).

    With ``settings.epochs == 0`` the head is returned at initialization.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(device_labels)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ValueError(f"features {x.shape} and labels {y.shape} do not align")
    present = np.unique(y)
    if n_devices < 2 or present.size < 2:
        raise ValueError(
            "need at least 2 devices to train the device classifier "
            "(a single device makes the posterior degenerate)"
        )
    if y.min() < 0 or y.max() >= n_devices:
        raise ValueError("device label out of range")

    head = Network([x.shape[1], settings.hidden_dim, n_devices], init_rng)
    opt = make_optimizer(settings.optimizer, settings.learning_rate)
    plateau = PlateauDetector(settings.patience, settings.min_relative_improvement)

    for _ in range(settings.epochs):
        losses = []
        for idx in _epoch_batches(x.shape[0], settings.batch_size, shuffle_rng):
            probs = softmax(head.forward(x[idx]))
            losses.append(batch_cross_entropy(probs, y[idx]))
            head.backward(softmax_cross_entropy_grad(probs, y[idx]))
            opt.step(head.parameters(), head.gradients())
        if plateau.update(float(np.mean(losses))):
            break

    predictions = np.argmax(head.forward(x), axis=1)
    accuracy = float(np.mean(predictions == y))
    return head, accuracy


def warm_up_scene_model(
    model: SceneModel,
    features: np.ndarray,
    scene_labels: np.ndarray,
    optimizer: str,
    learning_rate: float,
    batch_size: int,
    epochs: int,
    shuffle_rng: np.random.Generator,
) -> SceneModel:
    """Briefly train a copy of the scene model; the copy's extractor is then
    frozen and serves as the feature source for device scoring."""
    warm = model.copy()
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(scene_labels)
    ext_opt = make_optimizer(optimizer, learning_rate)
    head_opt = make_optimizer(optimizer, learning_rate)
    for _ in range(epochs):
        for idx in _epoch_batches(x.shape[0], batch_size, shuffle_rng):
            warm.train_step(x[idx], y[idx], ext_opt, head_opt)
    return warm
