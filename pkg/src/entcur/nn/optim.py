"""SGD and Adam parameter updates.

An optimizer is bound to one network's parameter list on first use; the
Adam moment buffers are congruent with the parameters and the step
counter increases by one per ``apply_update`` call.
"""

from __future__ import annotations

import numpy as np


class SGD:
    kind = "sgd"

    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        self.learning_rate = learning_rate
        self.step_count = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        _check_congruent(params, grads)
        self.step_count += 1
        for p, g in zip(params, grads):
            p -= self.learning_rate * g


class Adam:
    kind = "adam"

    def __init__(
        self,
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        self._m: list[np.ndarray] | None = None
        self._v: list[np.ndarray] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        _check_congruent(params, grads)
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        if len(self._m) != len(params) or any(
            m.shape != p.shape for m, p in zip(self._m, params)
        ):
            raise ValueError("optimizer state incongruent with parameters")
        self.step_count += 1
        t = self.step_count
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1**t)
            v_hat = v / (1.0 - self.beta2**t)
            p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)


Optimizer = SGD | Adam


def make_optimizer(kind: str, learning_rate: float) -> Optimizer:
    if kind == "sgd":
        return SGD(learning_rate)
    if kind == "adam":
        return Adam(learning_rate)
    raise ValueError(f"unknown optimizer kind {kind!r}")


def apply_update(net, grads: list[np.ndarray], opt: Optimizer):
    """Update a network's parameters in place from a gradient list."""
    opt.step(net.parameters(), grads)
    return net


def _check_congruent(params: list[np.ndarray], grads: list[np.ndarray]) -> None:
    if len(params) != len(grads):
        raise ValueError(f"{len(grads)} gradients for {len(params)} parameters")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {p.shape}")
