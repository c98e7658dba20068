from .network import DenseLayer, Network, check_finite
from .losses import (
    PROB_FLOOR,
    batch_cross_entropy,
    cross_entropy,
    softmax,
    softmax_cross_entropy_grad,
)
from .optim import SGD, Adam, Optimizer, apply_update, make_optimizer
from .gradcheck import (
    analytic_gradients,
    classification_loss,
    max_relative_gradient_error,
    numerical_gradients,
)
from .checkpoint import load_network, network_from_dict, network_to_dict, save_network
from .model import SceneModel, load_model, save_model

__all__ = [
    "DenseLayer",
    "Network",
    "check_finite",
    "PROB_FLOOR",
    "softmax",
    "cross_entropy",
    "batch_cross_entropy",
    "softmax_cross_entropy_grad",
    "SGD",
    "Adam",
    "Optimizer",
    "make_optimizer",
    "apply_update",
    "classification_loss",
    "analytic_gradients",
    "numerical_gradients",
    "max_relative_gradient_error",
    "save_network",
    "load_network",
    "network_to_dict",
    "network_from_dict",
    "SceneModel",
    "save_model",
    "load_model",
]
