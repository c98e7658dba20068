"""Versioned JSON checkpoints for networks.

Layout::

    {"format": "entcur-network", "version": 1,
     "layers": [{"in_dim": ..., "out_dim": ..., "activation": "relu",
                 "weights": [[...row-major...]], "bias": [...]}, ...]}

JSON floats are written with ``repr`` precision, so save -> load is
value-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .network import DenseLayer, Network

FORMAT_NAME = "entcur-network"
FORMAT_VERSION = 1


def network_to_dict(net: Network) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "layers": [
            {
                "in_dim": layer.in_dim,
                "out_dim": layer.out_dim,
                "activation": layer.activation,
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
            }
            for layer in net.layers
        ],
    }


def network_from_dict(doc: dict) -> Network:
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')!r}")
    net = Network.__new__(Network)
    net.layers = []
    prev_out = None
    for spec in doc["layers"]:
        layer = DenseLayer.__new__(DenseLayer)
        layer.weights = np.asarray(spec["weights"], dtype=np.float64)
        layer.bias = np.asarray(spec["bias"], dtype=np.float64)
        layer.activation = spec["activation"]
        layer.grad_weights = None
        layer.grad_bias = None
        layer._input = None
        layer._pre = None
        if layer.weights.shape != (spec["out_dim"], spec["in_dim"]):
            raise ValueError("checkpoint weight shape disagrees with declared dims")
        if layer.bias.shape != (spec["out_dim"],):
            raise ValueError("checkpoint bias shape disagrees with declared dims")
        if prev_out is not None and spec["in_dim"] != prev_out:
            raise ValueError("checkpoint layer dimensions do not chain")
        prev_out = spec["out_dim"]
        net.layers.append(layer)
    if not net.layers:
        raise ValueError("checkpoint has no layers")
    return net


def save_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net)) + "\n")


def load_network(path: str | Path) -> Network:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed checkpoint {path}: {exc}") from exc
    return network_from_dict(doc)
