"""
Transformer motion generator.

Input tokens are the padded context (the last real frame repeated n times) projected
to d_model plus sinusoidal position, pad-flag and time-to-arrival beat embeddings.
Style enters through conditional layer norm at every norm site (or as extra tokens
in the ``mt`` ablation); long history enters through a multimodal adaptation gate
after layer ``mag_layer`` on the last n positions. Two heads read those positions.
"""

from typing import Optional, Union

import numpy as np
import torch
from torch import nn

from ..core.errors import NonFiniteActivation, ShapeMismatch
from ..models.beat_model import BeatTrack
from ..models.embedding_model import GeneratorOutput, LongHistoryEmbedding, StyleEmbedding
from ..nn import functional as F
from ..nn.layers import LayerNorm, Linear, TransformerLayer, sinusoidal_positions
from ..rhythm.tta import tta_encode
from ..schemas.config_schemas import ModelConfig

CONTACT_LABELS = 2
ALPHA_FLOOR = 1e-8


def pad_motion(frames: Union[np.ndarray, torch.Tensor], n: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Repeat the last frame n times along the time axis; mask is 1 on padded rows."""
    frames = F.as_tensor(frames, frames.dtype if isinstance(frames, torch.Tensor) else torch.float32)
    length = frames.shape[-2]
    if length < 1:
        raise ShapeMismatch("cannot pad an empty context")
    last = frames[..., length - 1: length, :]
    repeated = last.expand(*last.shape[:-2], n, last.shape[-1])
    padded = torch.cat([frames, repeated], dim=-2)
    mask = torch.cat([torch.zeros(length, dtype=torch.long), torch.ones(n, dtype=torch.long)])
    return padded, mask


class ConditionalLayerNorm(nn.Module):
    """Layer norm whose γ and β receive corrections predicted from a style vector."""

    def __init__(self, d_model: int, d_style: int, hidden: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self.d_style = d_style
        self.gamma = nn.Parameter(torch.ones(d_model))
        self.beta = nn.Parameter(torch.zeros(d_model))
        self.delta_gamma = nn.Sequential(Linear(d_style, hidden), nn.GELU(), Linear(hidden, d_model))
        self.delta_beta = nn.Sequential(Linear(d_style, hidden), nn.GELU(), Linear(hidden, d_model))

    def forward(self, x: torch.Tensor, condition: Optional[torch.Tensor] = None) -> torch.Tensor:
        if condition is None or condition.shape[-1] != self.d_style:
            raise ShapeMismatch(f"conditional layer norm needs a {self.d_style}-wide style vector")
        d_gamma = self.delta_gamma(condition).unsqueeze(-2)
        d_beta = self.delta_beta(condition).unsqueeze(-2)
        return F.normalize(x, self.eps) * (self.gamma + d_gamma) + (self.beta + d_beta)


def cln(x: torch.Tensor, h_style: torch.Tensor, norm: ConditionalLayerNorm) -> torch.Tensor:
    """Apply ``norm`` conditioned on the time-pooled style embedding."""
    return norm(x, F.avg_pool_time(h_style))


def mag_alpha(z_norm: torch.Tensor, h_norm: torch.Tensor, beta_hyper: float) -> torch.Tensor:
    ratio = z_norm / h_norm.clamp_min(ALPHA_FLOOR) * beta_hyper
    return torch.where(h_norm <= ALPHA_FLOOR, torch.ones_like(ratio), ratio.clamp(max=1.0))


class MultimodalGate(nn.Module):
    """Gated additive fusion of E_hist rows into the last n hidden states."""

    def __init__(self, d_model: int, beta_hyper: float = 1.0):
        super().__init__()
        self.beta_hyper = beta_hyper
        self.gate = Linear(2 * d_model, d_model, bias=False)
        self.memory = Linear(d_model, d_model, bias=False)
        self.gate_bias = nn.Parameter(torch.zeros(d_model))
        self.memory_bias = nn.Parameter(torch.zeros(d_model))

    def forward(self, z: torch.Tensor, e_hist: torch.Tensor) -> torch.Tensor:
        n = e_hist.shape[-2]
        if z.shape[-2] < n or z.shape[-1] != e_hist.shape[-1]:
            raise ShapeMismatch(f"cannot fuse E_hist {tuple(e_hist.shape)} into {tuple(z.shape)}")
        head, tail = z[..., : z.shape[-2] - n, :], z[..., z.shape[-2] - n:, :]
        g = F.relu(self.gate(torch.cat([tail, e_hist], dim=-1)) + self.gate_bias)
        h = g * self.memory(e_hist) + self.memory_bias
        alpha = mag_alpha(F.l2norm(tail), F.l2norm(h), self.beta_hyper)
        return torch.cat([head, tail + alpha.unsqueeze(-1) * h], dim=-2)


def mag_fuse(gate: MultimodalGate, z: torch.Tensor, e_hist: torch.Tensor) -> torch.Tensor:
    return gate(z, e_hist)


class MotionGenerator(nn.Module):
    def __init__(self, config: ModelConfig, pose_dim: int):
        super().__init__()
        d = config.d_model
        self.config = config
        self.pose_dim = pose_dim
        self.input_proj = Linear(pose_dim, d)
        self.pad_embedding = nn.Embedding(2, d)
        self.beat_embedding = nn.Embedding(config.tta_cap + 1, d)

        self.style_proj: Optional[Linear] = None
        length = config.w_ctx + config.n
        if config.fusion == "mt":
            self.style_proj = Linear(d, d)
            length += config.w_style
            norm_factory = lambda: LayerNorm(d)  # noqa: E731
        else:
            norm_factory = lambda: ConditionalLayerNorm(d, d, config.condition_hidden)  # noqa: E731
        self.register_buffer("positions", sinusoidal_positions(length, d), persistent=False)

        self.layers = nn.ModuleList(
            TransformerLayer(d, config.heads, config.ffn, config.dropout, key=f"gen.{i}", norm_factory=norm_factory)
            for i in range(config.layers)
        )
        self.final_norm = norm_factory()
        self.gate = MultimodalGate(d, config.mag_beta) if config.long_history == "on" else None
        self.pose_head = Linear(d, pose_dim)
        self.contact_head = Linear(d, CONTACT_LABELS)

    def forward(
        self,
        context: torch.Tensor,
        tta: torch.Tensor,
        h_style: torch.Tensor,
        e_hist: Optional[torch.Tensor] = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """context (B, w_ctx, D), tta (B, w_ctx+n) -> poses (B, n, D), contact logits (B, n, 2)."""
        n = self.config.n
        if context.shape[-2] != self.config.w_ctx or context.shape[-1] != self.pose_dim:
            raise ShapeMismatch(
                f"context must be {self.config.w_ctx} x {self.pose_dim}, got {tuple(context.shape[-2:])}"
            )
        if tta.shape[-1] != self.config.w_ctx + n:
            raise ShapeMismatch(f"beat context must cover {self.config.w_ctx + n} frames")

        padded, mask = pad_motion(context, n)
        x = self.input_proj(padded) + self.pad_embedding(mask) + self.beat_embedding(tta)
        condition = None
        if self.style_proj is not None:
            x = torch.cat([self.style_proj(h_style), x], dim=-2)
        else:
            condition = F.avg_pool_time(h_style)
        x = x + self.positions[: x.shape[-2]].to(x.dtype)

        for index, layer in enumerate(self.layers):
            x = layer(x, condition)
            if index == self.config.mag_layer and self.gate is not None and e_hist is not None:
                x = self.gate(x, e_hist)
        x = self.final_norm(x, condition)

        tail = x[..., x.shape[-2] - n:, :]
        poses = self.pose_head(tail)
        if self.config.residual_head:
            poses = poses + padded[..., padded.shape[-2] - n:, :]
        logits = self.contact_head(tail)
        if not (torch.isfinite(poses).all() and torch.isfinite(logits).all()):
            raise NonFiniteActivation("generator produced non-finite output")
        return poses, logits


def generate_step(
    generator: MotionGenerator,
    history: Union[np.ndarray, torch.Tensor],
    beats: BeatTrack,
    style: StyleEmbedding,
    e_hist: Optional[LongHistoryEmbedding] = None,
) -> GeneratorOutput:
    """Predict the next n frames from the latest w_ctx frames and the beats around them."""
    config = generator.config
    if len(beats) != config.w_ctx + config.n:
        raise ShapeMismatch(f"beat window has {len(beats)} frames, expected {config.w_ctx + config.n}")
    dtype = generator.input_proj.weight.dtype
    context = F.as_tensor(history, dtype).unsqueeze(0)
    tta = torch.from_numpy(np.array(tta_encode(beats, config.tta_cap).values)).unsqueeze(0)
    h_style = style.h_style.to(dtype)
    h_style = h_style.unsqueeze(0) if h_style.dim() == 2 else h_style
    memory = None
    if e_hist is not None:
        memory = e_hist.e_hist.to(dtype)
        memory = memory.unsqueeze(0) if memory.dim() == 2 else memory
    poses, logits = generator(context, tta, h_style, memory)
    return GeneratorOutput(poses=poses.squeeze(0), contact_logits=logits.squeeze(0))
