from typing import Optional, Union

import numpy as np
import torch
from torch import nn

from ..core.errors import BadLength
from ..models.embedding_model import StyleEmbedding
from ..models.motion_model import MUSIC_DIM, MotionClip, MusicFeatureTrack
from ..nn import functional as F
from ..nn.layers import LayerNorm, Linear, TransformerLayer, sinusoidal_positions
from ..schemas.config_schemas import ModelConfig

Exemplar = Union[MusicFeatureTrack, MotionClip, np.ndarray, torch.Tensor]


class StyleEncoder(nn.Module):
    """Input projection, sinusoidal positions and a bidirectional Transformer stack."""

    def __init__(self, input_dim: int, config: ModelConfig, key: str):
        super().__init__()
        self.input_dim = input_dim
        self.window = config.w_style
        self.input_proj = Linear(input_dim, config.d_model)
        self.layers = nn.ModuleList(
            TransformerLayer(config.d_model, config.heads, config.ffn, config.dropout, key=f"{key}.{i}")
            for i in range(config.style_layers)
        )
        self.final_norm = LayerNorm(config.d_model)
        self.register_buffer(
            "positions", sinusoidal_positions(config.w_style, config.d_model), persistent=False
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """(B, w_style, input_dim) -> (B, w_style, d_s)."""
        if x.shape[-2] != self.window:
            raise BadLength(f"style exemplar has {x.shape[-2]} frames, expected {self.window}")
        h = self.input_proj(x) + self.positions.to(x.dtype)
        for layer in self.layers:
            h = layer(h)
        return self.final_norm(h)


class StyleEncoders(nn.Module):
    """Music and motion style encoders; the motion branch is absent for music-only style."""

    def __init__(self, config: ModelConfig, pose_dim: int):
        super().__init__()
        self.music = StyleEncoder(MUSIC_DIM, config, "style.music")
        self.motion: Optional[StyleEncoder] = None
        if config.style_source == "both":
            self.motion = StyleEncoder(pose_dim, config, "style.motion")

    def forward(self, music: torch.Tensor, motion: Optional[torch.Tensor] = None) -> torch.Tensor:
        h_style = self.music(music)
        if self.motion is not None and motion is not None:
            h_style = h_style + self.motion(motion)
        return h_style


def _as_window(exemplar: Exemplar, dtype: torch.dtype) -> torch.Tensor:
    if isinstance(exemplar, (MusicFeatureTrack, MotionClip)):
        exemplar = exemplar.frames
    tensor = F.as_tensor(exemplar, dtype)
    return tensor.unsqueeze(0) if tensor.dim() == 2 else tensor


def _param_dtype(module: nn.Module) -> torch.dtype:
    return next(module.parameters()).dtype


def encode_music(encoders: StyleEncoders, music: Exemplar) -> torch.Tensor:
    """Encode one music exemplar of w_style frames into a (w_style, d_s) matrix."""
    x = _as_window(music, _param_dtype(encoders))
    return encoders.music(x).squeeze(0)


def encode_motion(encoders: StyleEncoders, motion: Exemplar) -> torch.Tensor:
    if encoders.motion is None:
        raise BadLength("this model was built without a motion style encoder")
    x = _as_window(motion, _param_dtype(encoders))
    return encoders.motion(x).squeeze(0)


def style_embedding(
    encoders: StyleEncoders, music: Exemplar, motion: Optional[Exemplar] = None
) -> StyleEmbedding:
    """H_style = H_music + H_motion (H_music alone without a motion encoder)."""
    h_style = encode_music(encoders, music)
    if encoders.motion is not None and motion is not None:
        h_style = h_style + encode_motion(encoders, motion)
    return StyleEmbedding(
        h_style=h_style,
        music_id=getattr(music, "track_id", ""),
        motion_id=getattr(motion, "clip_id", "") if motion is not None else "",
    )


def triplet_hinge(
    anchor: torch.Tensor, positive: torch.Tensor, negative: torch.Tensor, margin: float
) -> torch.Tensor:
    """max(|a - p| - |a - n| + margin, 0) on pooled vectors, one value per row."""
    d_pos = F.l2norm(anchor - positive)
    d_neg = F.l2norm(anchor - negative)
    return torch.clamp(d_pos - d_neg + margin, min=0.0)


def triplet_loss(
    encoder: StyleEncoder,
    anchor: Exemplar,
    positive: Exemplar,
    negative: Exemplar,
    margin: float = 0.2,
) -> torch.Tensor:
    """Batch-mean triplet hinge over time-pooled music style encodings."""
    dtype = _param_dtype(encoder)
    pooled = [
        F.avg_pool_time(encoder(_as_window(x, dtype))) for x in (anchor, positive, negative)
    ]
    return triplet_hinge(*pooled, margin).mean()
