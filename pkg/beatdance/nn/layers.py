"""
Building blocks shared by the style encoders, the long-history encoder and the
generator: Xavier-initialised projections, temporal convolutions, counter-keyed
dropout, multi-head attention and pre-norm Transformer layers.
"""

import math
from typing import Callable, Optional

import torch
from torch import nn

from ..core.errors import ShapeMismatch
from ..core.utils import derive_seed
from . import functional as F


class Linear(nn.Linear):
    """nn.Linear with Xavier-uniform weights and zero bias."""

    def reset_parameters(self) -> None:
        nn.init.xavier_uniform_(self.weight)
        if self.bias is not None:
            nn.init.zeros_(self.bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[-1] != self.in_features:
            raise ShapeMismatch(f"linear expects width {self.in_features}, got {x.shape[-1]}")
        return super().forward(x)


class Conv1d(nn.Module):
    """'Same'-padded temporal convolution holding a (k, d_in, d_out) kernel."""

    def __init__(self, in_dim: int, out_dim: int, kernel_size: int = 3):
        super().__init__()
        if kernel_size % 2 == 0:
            raise ShapeMismatch(f"kernel size {kernel_size} must be odd")
        bound = math.sqrt(6.0 / ((in_dim + out_dim) * kernel_size))
        self.kernel = nn.Parameter(torch.empty(kernel_size, in_dim, out_dim).uniform_(-bound, bound))
        self.bias = nn.Parameter(torch.zeros(out_dim))

    @property
    def kernel_size(self) -> int:
        return self.kernel.shape[0]

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.conv1d(x, self.kernel, self.bias)


class KeyedDropout(nn.Module):
    """Inverted dropout whose mask depends only on (seed, step, layer key, call index).

    ``reseed`` is called once per optimisation step (see ``set_dropout_step``), so a
    replayed step draws the same masks regardless of what ran before it.
    """

    def __init__(self, p: float, key: str):
        super().__init__()
        self.p = p
        self.key = key
        self.seed = 0
        self.step = 0
        self._calls = 0

    def reseed(self, seed: int, step: int) -> None:
        self.seed, self.step, self._calls = seed, step, 0

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if not self.training or self.p <= 0.0:
            return x
        generator = torch.Generator().manual_seed(
            derive_seed(self.seed, self.step, self.key, self._calls)
        )
        self._calls += 1
        keep = torch.rand(x.shape, generator=generator, dtype=x.dtype) >= self.p
        return x * keep / (1.0 - self.p)


def set_dropout_step(module: nn.Module, seed: int, step: int) -> None:
    for child in module.modules():
        if isinstance(child, KeyedDropout):
            child.reseed(seed, step)


class LayerNorm(nn.Module):
    """Layer norm with γ=1, β=0 init; ignores the conditioning argument."""

    def __init__(self, dim: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self.gamma = nn.Parameter(torch.ones(dim))
        self.beta = nn.Parameter(torch.zeros(dim))

    def forward(self, x: torch.Tensor, condition: Optional[torch.Tensor] = None) -> torch.Tensor:
        return F.layer_norm(x, self.gamma, self.beta, self.eps)


def sinusoidal_positions(length: int, dim: int, dtype=torch.float32) -> torch.Tensor:
    position = torch.arange(length, dtype=torch.float64)[:, None]
    rate = torch.exp(-math.log(10000.0) * torch.arange(0, dim, 2, dtype=torch.float64) / dim)
    table = torch.zeros(length, dim, dtype=torch.float64)
    table[:, 0::2] = torch.sin(position * rate)
    table[:, 1::2] = torch.cos(position * rate[: dim // 2])
    return table.to(dtype)


class MultiHeadAttention(nn.Module):
    """Scaled dot-product attention over ``heads`` heads; returns output and weights."""

    def __init__(self, d_model: int, heads: int, dropout: float = 0.0, key: str = "attn"):
        super().__init__()
        if heads <= 0 or d_model % heads:
            raise ShapeMismatch(f"d_model {d_model} not divisible by {heads} heads")
        self.heads = heads
        self.head_dim = d_model // heads
        self.q_proj = Linear(d_model, d_model)
        self.k_proj = Linear(d_model, d_model)
        self.v_proj = Linear(d_model, d_model)
        self.out_proj = Linear(d_model, d_model)
        self.dropout = KeyedDropout(dropout, f"{key}.weights")

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        batch, length, _ = x.shape
        return x.view(batch, length, self.heads, self.head_dim).transpose(1, 2)

    def forward(
        self,
        query: torch.Tensor,
        context: Optional[torch.Tensor] = None,
        causal: bool = False,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        context = query if context is None else context
        if query.dim() != 3 or context.dim() != 3:
            raise ShapeMismatch("attention expects (batch, length, d_model) inputs")
        q = self._split(self.q_proj(query))
        k = self._split(self.k_proj(context))
        v = self._split(self.v_proj(context))
        mask = None
        if causal:
            q_len, k_len = query.shape[1], context.shape[1]
            mask = torch.ones(q_len, k_len, dtype=torch.bool).triu(k_len - q_len + 1)
        out, weights = F.attention(q, k, v, mask=mask, dropout=self.dropout)
        batch, _, length, _ = out.shape
        out = out.transpose(1, 2).reshape(batch, length, self.heads * self.head_dim)
        return self.out_proj(out), weights


class FeedForward(nn.Module):
    def __init__(self, d_model: int, hidden: int, dropout: float = 0.0, key: str = "ffn"):
        super().__init__()
        self.fc1 = Linear(d_model, hidden)
        self.fc2 = Linear(hidden, d_model)
        self.dropout = KeyedDropout(dropout, f"{key}.out")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.dropout(self.fc2(F.gelu(self.fc1(x))))


NormFactory = Callable[[], nn.Module]


class TransformerLayer(nn.Module):
    """Pre-norm encoder layer; the norm modules receive an optional condition vector."""

    def __init__(
        self,
        d_model: int,
        heads: int,
        ffn: int,
        dropout: float = 0.0,
        key: str = "layer",
        norm_factory: Optional[NormFactory] = None,
    ):
        super().__init__()
        norm_factory = norm_factory or (lambda: LayerNorm(d_model))
        self.attn_norm = norm_factory()
        self.attn = MultiHeadAttention(d_model, heads, dropout, key=f"{key}.attn")
        self.ffn_norm = norm_factory()
        self.ffn = FeedForward(d_model, ffn, dropout, key=f"{key}.ffn")

    def forward(
        self, x: torch.Tensor, condition: Optional[torch.Tensor] = None, causal: bool = False
    ) -> torch.Tensor:
        attended, _ = self.attn(self.attn_norm(x, condition), causal=causal)
        x = x + attended
        return x + self.ffn(self.ffn_norm(x, condition))
