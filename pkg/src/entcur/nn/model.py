"""Scene model: a feature extractor network with a classifier head.

The two halves are separate ``Network``s so the extractor can be frozen
and probed on its own (the device classifier trains against extractor
outputs).  Joint training backpropagates the head's input gradient into
the extractor.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .checkpoint import network_from_dict, network_to_dict
from .losses import batch_cross_entropy, softmax, softmax_cross_entropy_grad
from .network import Network
from .optim import Optimizer

MODEL_FORMAT = "entcur-scene-model"
MODEL_VERSION = 1


class SceneModel:
    def __init__(self, extractor: Network, head: Network):
        if extractor.output_dim != head.input_dim:
            raise ValueError(
                f"extractor output dim {extractor.output_dim} does not feed "
                f"head input dim {head.input_dim}"
            )
        self.extractor = extractor
        self.head = head

    @classmethod
    def build(
        cls,
        input_dim: int,
        hidden_dims: list[int],
        feature_dim: int,
        n_classes: int,
        rng: np.random.Generator,
    ) -> "SceneModel":
        extractor = Network([input_dim, *hidden_dims, feature_dim], rng)
        head = Network([feature_dim, n_classes], rng)
        return cls(extractor, head)

    def features(self, batch: np.ndarray) -> np.ndarray:
        return self.extractor.forward(batch)

    def logits(self, batch: np.ndarray) -> np.ndarray:
        return self.head.forward(self.extractor.forward(batch))

    def predict(self, batch: np.ndarray) -> np.ndarray:
        """Argmax class per row; ties resolve to the lowest class index."""
        return np.argmax(self.logits(batch), axis=1)

    def loss(self, batch: np.ndarray, labels: np.ndarray) -> float:
        return batch_cross_entropy(softmax(self.logits(batch)), labels)

    def train_step(
        self,
        batch: np.ndarray,
        labels: np.ndarray,
        extractor_opt: Optimizer,
        head_opt: Optimizer,
    ) -> float:
        """One fused softmax/cross-entropy gradient step on both halves."""
        feats = self.extractor.forward(batch)
        probs = softmax(self.head.forward(feats))
        loss = batch_cross_entropy(probs, labels)
        d_feats = self.head.backward(softmax_cross_entropy_grad(probs, labels))
        self.extractor.backward(d_feats)
        head_opt.step(self.head.parameters(), self.head.gradients())
        extractor_opt.step(self.extractor.parameters(), self.extractor.gradients())
        return loss

    def copy(self) -> "SceneModel":
        return SceneModel(self.extractor.copy(), self.head.copy())


def save_model(model: SceneModel, path: str | Path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "extractor": network_to_dict(model.extractor),
        "head": network_to_dict(model.head),
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_model(path: str | Path) -> SceneModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed model checkpoint {path}: {exc}") from exc
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} document")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model checkpoint version {doc.get('version')!r}")
    return SceneModel(network_from_dict(doc["extractor"]), network_from_dict(doc["head"]))
