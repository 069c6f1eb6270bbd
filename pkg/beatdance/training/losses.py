from typing import Union

import torch

from ..core.errors import ShapeMismatch
from ..nn import functional as F

Scalar = Union[float, torch.Tensor]


def _frame_norm_sum(difference: torch.Tensor) -> torch.Tensor:
    # sum over frames of per-frame L2 norms, averaged over any leading batch axes
    per_sequence = F.l2norm(difference, axis=-1).sum(dim=-1)
    return per_sequence.mean() if per_sequence.dim() else per_sequence


def loss_rec(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    if pred.shape != target.shape:
        raise ShapeMismatch(f"pose prediction {tuple(pred.shape)} vs target {tuple(target.shape)}")
    return _frame_norm_sum(pred - target)


def loss_foot(logits: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Contact loss on sigmoid probabilities."""
    if logits.shape != target.shape:
        raise ShapeMismatch(f"contact logits {tuple(logits.shape)} vs labels {tuple(target.shape)}")
    return _frame_norm_sum(torch.sigmoid(logits) - target.to(logits.dtype))


def total_loss(
    l_rec: Scalar,
    l_foot: Scalar,
    l_trip: Scalar,
    lambda_rec: float = 1.0,
    lambda_foot: float = 0.1,
    lambda_trip: float = 0.1,
) -> Scalar:
    return lambda_rec * l_rec + lambda_foot * l_foot + lambda_trip * l_trip
