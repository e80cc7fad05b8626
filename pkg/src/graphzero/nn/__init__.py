from .adam import Adam
from .autodiff import Tensor, no_grad
from .network import GinNetwork, GraphBatch, NetConfig, NetOutput, loss
from .weights_io import load_weights, save_weights

__all__ = [
    "Adam", "Tensor", "no_grad", "GinNetwork", "GraphBatch", "NetConfig",
    "NetOutput", "loss", "load_weights", "save_weights",
]
