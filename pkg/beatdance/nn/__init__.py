from . import functional
from .checkpoint import assign_parameters, load_checkpoint, read_checkpoint, save_checkpoint
from .gradcheck import grad_check
from .layers import (
    Conv1d,
    FeedForward,
    KeyedDropout,
    LayerNorm,
    Linear,
    MultiHeadAttention,
    TransformerLayer,
    set_dropout_step,
    sinusoidal_positions,
)
from .params import ModelParams, adam_step

__all__ = [
    "functional",
    "assign_parameters",
    "load_checkpoint",
    "read_checkpoint",
    "save_checkpoint",
    "grad_check",
    "Conv1d",
    "FeedForward",
    "KeyedDropout",
    "LayerNorm",
    "Linear",
    "MultiHeadAttention",
    "TransformerLayer",
    "set_dropout_step",
    "sinusoidal_positions",
    "ModelParams",
    "adam_step",
]
