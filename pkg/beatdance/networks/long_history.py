"""
Attention over long motion history.

The query is the pooled CNN_q encoding of the latest m frames. Each earlier start i
contributes a key (pooled CNN_k of frames [i, i+m)) and a value (CNN_V of the n
frames right after the key window). Starts run over 0..T-2m-n so no value window
overlaps the query. Logits are raw dot products, clipped to +-50.

Both CNNs are linear, so pooled keys are computed from per-tap window sums and
E_hist = CNN_V(sum_i a_i X[i+m : i+m+n]) without materialising every value matrix.
"""

from typing import TYPE_CHECKING, Optional, Union

import numpy as np
import torch
from torch import nn

from ..core.errors import InsufficientHistory, NoEligibleClip
from ..core.utils import make_rng
from ..models.embedding_model import LongHistoryEmbedding
from ..models.motion_model import MotionClip
from ..nn import functional as F
from ..nn.layers import Conv1d

if TYPE_CHECKING:
    from ..training.dataset import DanceDataset

LOGIT_CLIP = 50.0


class LongHistoryEncoder(nn.Module):
    def __init__(self, pose_dim: int, d_model: int, m: int = 10, n: int = 7, kernel_size: int = 3):
        super().__init__()
        self.m, self.n, self.d_model = m, n, d_model
        self.cnn_q = Conv1d(pose_dim, d_model, kernel_size)
        self.cnn_k = Conv1d(pose_dim, d_model, kernel_size)
        self.cnn_v = Conv1d(pose_dim, d_model, kernel_size)

    @property
    def min_length(self) -> int:
        return 2 * self.m + self.n

    def window_count(self, length: int) -> int:
        return length - self.min_length + 1

    def _pooled_keys(self, history: torch.Tensor, windows: int) -> torch.Tensor:
        m = self.m
        kernel = self.cnn_k.kernel
        centre = kernel.shape[0] // 2
        unfolded = history[:, : windows + m - 1].unfold(1, m, 1)  # (B, W, D, m)
        pooled = 0.0
        for tap in range(kernel.shape[0]):
            shift = tap - centre
            lo, hi = max(0, shift), m + min(0, shift)
            if hi > lo:
                pooled = pooled + unfolded[..., lo:hi].sum(dim=-1) @ kernel[tap]
        return pooled / m + self.cnn_k.bias

    def forward(self, history: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """(B, T, D) -> E_hist (B, n, d), weights (B, T-2m-n+1)."""
        length = history.shape[1]
        if length < self.min_length:
            raise InsufficientHistory(
                f"history of {length} frames is shorter than 2m+n = {self.min_length}"
            )
        windows = self.window_count(length)
        query = F.avg_pool_time(self.cnn_q(history[:, length - self.m:]))
        keys = self._pooled_keys(history, windows)
        logits = torch.einsum("bd,bwd->bw", query, keys).clamp(-LOGIT_CLIP, LOGIT_CLIP)
        weights = F.softmax(logits, axis=-1)
        values = history[:, self.m: self.m + windows + self.n - 1].unfold(1, self.n, 1)
        mixed = torch.einsum("bw,bwdn->bnd", weights, values)
        return self.cnn_v(mixed), weights

    def zeros(self, batch: int = 1, dtype: torch.dtype = torch.float32) -> torch.Tensor:
        return torch.zeros(batch, self.n, self.d_model, dtype=dtype)


def encode_history(
    encoder: LongHistoryEncoder, history: Union[MotionClip, np.ndarray, torch.Tensor]
) -> LongHistoryEmbedding:
    frames = history.frames if isinstance(history, MotionClip) else history
    x = F.as_tensor(frames, encoder.cnn_q.kernel.dtype)
    e_hist, weights = encoder(x.unsqueeze(0) if x.dim() == 2 else x)
    return LongHistoryEmbedding(e_hist=e_hist.squeeze(0), weights=weights.squeeze(0))


def sample_training_history(
    style_label: int,
    dataset: "DanceDataset",
    length: int,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> MotionClip:
    """Random ``length``-frame slice of a random same-style clip.

    Pass either ``seed`` or a running ``rng``.
    """
    rng = rng if rng is not None else make_rng("history", style_label, seed or 0)
    eligible = [clip for clip in dataset.clips_of_style(style_label) if clip.num_frames >= length]
    if not eligible:
        raise NoEligibleClip(f"no clip of style {style_label} has {length} frames")
    clip = eligible[int(rng.integers(len(eligible)))]
    offset = int(rng.integers(clip.num_frames - length + 1))
    return clip.slice(offset, offset + length)
