"""
Shape-checked tensor operations. Gradients come from torch autograd; these
wrappers pin down the exact semantics (population variance, zero-padded
cross-correlation, unscaled or scaled attention logits) and raise ShapeMismatch
instead of backend errors.
"""

from typing import Callable, Optional

import numpy as np
import torch
import torch.nn.functional as F

from ..core.errors import ShapeMismatch


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ShapeMismatch(message)


def matmul(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    _require(a.dim() >= 1 and b.dim() >= 1, "matmul needs at least 1-D operands")
    inner_b = b.shape[-2] if b.dim() > 1 else b.shape[0]
    _require(a.shape[-1] == inner_b, f"matmul {tuple(a.shape)} @ {tuple(b.shape)}")
    return a @ b


def add(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    try:
        torch.broadcast_shapes(a.shape, b.shape)
    except RuntimeError as exc:
        raise ShapeMismatch(f"cannot broadcast {tuple(a.shape)} + {tuple(b.shape)}") from exc
    return a + b


def relu(x: torch.Tensor) -> torch.Tensor:
    return torch.relu(x)


def gelu(x: torch.Tensor) -> torch.Tensor:
    return F.gelu(x)


def softmax(x: torch.Tensor, axis: int = -1) -> torch.Tensor:
    return torch.softmax(x, dim=axis)


def mean(x: torch.Tensor, axis: Optional[int] = None) -> torch.Tensor:
    return x.mean() if axis is None else x.mean(dim=axis)


def l2norm(x: torch.Tensor, axis: int = -1) -> torch.Tensor:
    return torch.linalg.vector_norm(x, dim=axis)


def normalize(x: torch.Tensor, eps: float) -> torch.Tensor:
    """(x - E[x]) / sqrt(Var[x] + eps) over the last axis, population variance."""
    centered = x - x.mean(dim=-1, keepdim=True)
    variance = (centered * centered).mean(dim=-1, keepdim=True)
    return centered / torch.sqrt(variance + eps)


def layer_norm(x: torch.Tensor, gamma: torch.Tensor, beta: torch.Tensor, eps: float = 1e-5) -> torch.Tensor:
    _require(
        gamma.shape[-1] == x.shape[-1] and beta.shape[-1] == x.shape[-1],
        f"layer_norm affine width {gamma.shape[-1]}/{beta.shape[-1]} != {x.shape[-1]}",
    )
    return normalize(x, eps) * gamma + beta


def conv1d(x: torch.Tensor, kernel: torch.Tensor, bias: Optional[torch.Tensor] = None) -> torch.Tensor:
    """Temporal cross-correlation with zero 'same' padding.

    x: (..., T, d_in), kernel: (k, d_in, d_out) with k odd -> (..., T, d_out).
    """
    _require(kernel.dim() == 3, "conv1d kernel must be k x d_in x d_out")
    width, d_in, d_out = kernel.shape
    _require(width % 2 == 1, f"conv1d kernel width {width} must be odd")
    _require(x.shape[-1] == d_in, f"conv1d input width {x.shape[-1]} != {d_in}")
    lead = x.shape[:-2]
    flat = x.reshape(-1, x.shape[-2], d_in).transpose(1, 2)
    out = F.conv1d(flat, kernel.permute(2, 1, 0), bias=bias, padding=width // 2)
    return out.transpose(1, 2).reshape(*lead, x.shape[-2], d_out)


def avg_pool_time(x: torch.Tensor) -> torch.Tensor:
    """Average over the time axis: (..., T, d) -> (..., d)."""
    _require(x.dim() >= 2, "avg_pool_time needs a (..., T, d) tensor")
    return x.mean(dim=-2)


def attention(
    q: torch.Tensor,
    k: torch.Tensor,
    v: torch.Tensor,
    mask: Optional[torch.Tensor] = None,
    dropout: Optional[Callable[[torch.Tensor], torch.Tensor]] = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """softmax(q k^T / sqrt(d)) v over the last two axes; ``mask`` marks blocked pairs."""
    _require(q.shape[-1] == k.shape[-1], "attention query/key widths differ")
    _require(k.shape[-2] == v.shape[-2], "attention key/value lengths differ")
    logits = (q @ k.transpose(-2, -1)) / (q.shape[-1] ** 0.5)
    if mask is not None:
        logits = logits.masked_fill(mask, float("-inf"))
    weights = torch.softmax(logits, dim=-1)
    attended = weights if dropout is None else dropout(weights)
    return attended @ v, weights


def as_tensor(value, dtype: torch.dtype = torch.float32) -> torch.Tensor:
    """Tensor from a tensor or array; read-only arrays are copied first."""
    if isinstance(value, torch.Tensor):
        return value.to(dtype)
    return torch.from_numpy(np.array(value)).to(dtype)
