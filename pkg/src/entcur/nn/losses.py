"""Softmax and cross-entropy, with the fused backward used for training.

All math is float64.  ``softmax`` subtracts the row max before
exponentiating, so huge logits cannot overflow and the argmax is
preserved.  ``cross_entropy`` clamps the picked probability at
``PROB_FLOOR`` to keep the loss finite when a prediction collapses.
"""

from __future__ import annotations

import numpy as np

PROB_FLOOR = 1e-12


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax of a vector or a (batch, classes) matrix."""
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0:
        raise ValueError("softmax: empty logits")
    if z.ndim == 1:
        shifted = z - np.max(z)
        e = np.exp(shifted)
        return e / e.sum()
    if z.ndim != 2:
        raise ValueError(f"softmax: expected 1-D or 2-D input, got shape {z.shape}")
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(predicted: np.ndarray, label: int) -> float:
    """-log p[label] for one probability vector."""
    p = np.asarray(predicted, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError(f"cross_entropy: expected a probability vector, got shape {p.shape}")
    if not (0 <= label < p.shape[0]):
        raise IndexError(f"cross_entropy: label {label} out of range for {p.shape[0]} classes")
    return float(-np.log(max(p[label], PROB_FLOOR)))


def batch_cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean -log p[y] over a (batch, classes) probability matrix."""
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels)
    if p.ndim != 2 or y.shape != (p.shape[0],):
        raise ValueError(f"batch_cross_entropy: shapes {p.shape} / {y.shape} do not align")
    if y.size and (y.min() < 0 or y.max() >= p.shape[1]):
        raise IndexError("batch_cross_entropy: label out of range")
    picked = np.maximum(p[np.arange(p.shape[0]), y], PROB_FLOOR)
    return float(-np.log(picked).mean())


def softmax_cross_entropy_grad(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient of mean cross-entropy wrt the logits: (p - onehot(y)) / batch."""
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels)
    grad = p.copy()
    grad[np.arange(p.shape[0]), y] -= 1.0
    return grad / p.shape[0]
