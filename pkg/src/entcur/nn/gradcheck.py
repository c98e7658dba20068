"""Finite-difference verification of the analytic backward pass.

The numeric side only ever calls ``forward`` plus the loss; it never
touches ``backward``, so the two gradient routes stay independent.
"""

from __future__ import annotations

import numpy as np

from .losses import batch_cross_entropy, softmax, softmax_cross_entropy_grad
from .network import Network


def classification_loss(net: Network, batch: np.ndarray, labels: np.ndarray) -> float:
    """Mean softmax cross-entropy of the network on a labeled batch."""
    return batch_cross_entropy(softmax(net.forward(batch)), labels)


def analytic_gradients(net: Network, batch: np.ndarray, labels: np.ndarray) -> list[np.ndarray]:
    probs = softmax(net.forward(batch))
    net.backward(softmax_cross_entropy_grad(probs, labels))
    return [g.copy() for g in net.gradients()]


def numerical_gradients(
    net: Network, batch: np.ndarray, labels: np.ndarray, step: float = 1e-5
) -> list[np.ndarray]:
    """Central finite differences of the loss over every parameter entry."""
    grads = []
    for param in net.parameters():
        grad = np.zeros_like(param)
        flat_p = param.ravel()
        flat_g = grad.ravel()
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + step
            loss_plus = classification_loss(net, batch, labels)
            flat_p[i] = orig - step
            loss_minus = classification_loss(net, batch, labels)
            flat_p[i] = orig
            flat_g[i] = (loss_plus - loss_minus) / (2.0 * step)
        grads.append(grad)
    return grads


def max_relative_gradient_error(
    net: Network, batch: np.ndarray, labels: np.ndarray, step: float = 1e-5
) -> float:
    """Worst |analytic - numeric| / max(|analytic|, |numeric|, 1e-8) over all parameters."""
    analytic = analytic_gradients(net, batch, labels)
    numeric = numerical_gradients(net, batch, labels, step=step)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
