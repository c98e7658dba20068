"""Dense feedforward networks with hand-written forward/backward passes.

A ``Network`` is a chain of ``DenseLayer``s: ReLU on every hidden layer,
identity on the last.  Weights are float64 and initialized Glorot-uniform
from a caller-supplied generator, so two networks built from the same
seed are parameter-identical.

The backward pass consumes the activations cached by the most recent
forward pass; calling it without a prior forward is an error.
"""

from __future__ import annotations

import numpy as np

ACTIVATIONS = ("relu", "identity")


def check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")


class DenseLayer:
    """One affine layer with an elementwise activation.

    weights: (out_dim, in_dim), bias: (out_dim,).  ``forward`` caches the
    input and pre-activation needed by ``backward``; ``backward`` fills
    ``grad_weights`` / ``grad_bias`` and returns the input gradient.
    """

    def __init__(self, in_dim: int, out_dim: int, activation: str, rng: np.random.Generator):
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        if in_dim < 1 or out_dim < 1:
            raise ValueError("layer dimensions must be positive")
        limit = np.sqrt(6.0 / (in_dim + out_dim))
        self.weights = rng.uniform(-limit, limit, size=(out_dim, in_dim))
        self.bias = np.zeros(out_dim, dtype=np.float64)
        self.activation = activation
        self.grad_weights: np.ndarray | None = None
        self.grad_bias: np.ndarray | None = None
        self._input: np.ndarray | None = None
        self._pre: np.ndarray | None = None

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def forward(self, x: np.ndarray) -> np.ndarray:
        pre = x @ self.weights.T + self.bias
        self._input = x
        self._pre = pre
        if self.activation == "relu":
            return np.maximum(pre, 0.0)
        return pre

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        if self._input is None or self._pre is None:
            raise RuntimeError("backward called before forward")
        if self.activation == "relu":
            d_pre = d_out * (self._pre > 0.0)
        else:
            d_pre = d_out
        self.grad_weights = d_pre.T @ self._input
        self.grad_bias = d_pre.sum(axis=0)
        return d_pre @ self.weights


class Network:
    """Chain of dense layers: ReLU hidden layers, identity output layer."""

    def __init__(self, layer_dims: list[int], rng: np.random.Generator):
        if len(layer_dims) < 2:
            raise ValueError("need at least input and output dimensions")
        self.layers: list[DenseLayer] = []
        last = len(layer_dims) - 2
        for k in range(len(layer_dims) - 1):
            act = "identity" if k == last else "relu"
            self.layers.append(DenseLayer(layer_dims[k], layer_dims[k + 1], act, rng))

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def layer_dims(self) -> list[int]:
        return [self.input_dim] + [layer.out_dim for layer in self.layers]

    def forward(self, batch: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(batch, dtype=np.float64))
        if x.shape[1] != self.input_dim:
            raise ValueError(
                f"input has {x.shape[1]} columns, network expects {self.input_dim}"
            )
        check_finite(x, "network input")
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        """Backprop an upstream gradient; returns the gradient wrt the input."""
        grad = np.asarray(d_out, dtype=np.float64)
        if grad.ndim != 2 or grad.shape[1] != self.output_dim:
            raise ValueError(
                f"upstream gradient shape {grad.shape} does not match output dim {self.output_dim}"
            )
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def parameters(self) -> list[np.ndarray]:
        """Flat list [W0, b0, W1, b1, ...]; arrays are live references."""
        params: list[np.ndarray] = []
        for layer in self.layers:
            params.append(layer.weights)
            params.append(layer.bias)
        return params

    def gradients(self) -> list[np.ndarray]:
        grads: list[np.ndarray] = []
        for layer in self.layers:
            if layer.grad_weights is None or layer.grad_bias is None:
                raise RuntimeError("gradients requested before backward")
            grads.append(layer.grad_weights)
            grads.append(layer.grad_bias)
        return grads

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def copy(self) -> "Network":
        clone = Network.__new__(Network)
        clone.layers = []
        for layer in self.layers:
            twin = DenseLayer.__new__(DenseLayer)
            twin.weights = layer.weights.copy()
            twin.bias = layer.bias.copy()
            twin.activation = layer.activation
            twin.grad_weights = None
            twin.grad_bias = None
            twin._input = None
            twin._pre = None
            clone.layers.append(twin)
        return clone
