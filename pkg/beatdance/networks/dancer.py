"""
The full model (style encoders, long-history encoder, generator) and autoregressive
rollout. Rollout sees music only through the beat track and the style embedding.
"""

from typing import Optional

import numpy as np
import torch
from loguru import logger
from pydantic import BaseModel, ConfigDict
from torch import nn

from ..core.config import get_settings
from ..core.errors import BadLength, ConfigError, NonFiniteActivation, TooShort
from ..models.beat_model import BeatTrack
from ..models.embedding_model import LongHistoryEmbedding, StyleEmbedding
from ..models.motion_model import ContactTrack, MotionClip, pose_width
from ..motion.contacts import extract_foot_contacts
from ..schemas.config_schemas import ModelConfig
from .generator import MotionGenerator, generate_step
from .long_history import LongHistoryEncoder, encode_history
from .style_encoder import StyleEncoders


class DanceModel(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.pose_dim = pose_width(config.joint_count)
        self.style = StyleEncoders(config, self.pose_dim)
        self.history: Optional[LongHistoryEncoder] = None
        if config.long_history == "on":
            self.history = LongHistoryEncoder(
                self.pose_dim, config.d_model, config.m, config.n, config.history_kernel
            )
        self.generator = MotionGenerator(config, self.pose_dim)

    def forward(
        self,
        context: torch.Tensor,
        tta: torch.Tensor,
        music_exemplar: torch.Tensor,
        motion_exemplar: Optional[torch.Tensor] = None,
        history: Optional[torch.Tensor] = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        h_style = self.style(music_exemplar, motion_exemplar)
        e_hist = None
        if self.history is not None and history is not None:
            e_hist, _ = self.history(history)
        return self.generator(context, tta, h_style, e_hist)

    def history_embedding(self, frames: np.ndarray) -> Optional[LongHistoryEmbedding]:
        """E_hist of the latest frames; zeros while the history is still too short."""
        if self.history is None:
            return None
        if len(frames) < self.history.min_length:
            dtype = self.history.cnn_q.kernel.dtype
            return LongHistoryEmbedding(
                e_hist=self.history.zeros(dtype=dtype).squeeze(0), weights=torch.zeros(0, dtype=dtype)
            )
        return encode_history(self.history, frames)


class RolloutResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    clip: MotionClip
    contacts: ContactTrack
    completed: bool
    steps: int


def rollout(
    model: DanceModel,
    seed_motion: MotionClip,
    beats: BeatTrack,
    style: StyleEmbedding,
    total_frames: int,
    stride: int = 1,
    history_max: Optional[int] = None,
) -> RolloutResult:
    """Extend ``seed_motion`` to ``total_frames`` by appending ``stride`` predicted frames per step.

    A non-finite activation stops generation; the partial clip comes back with
    ``completed=False``.
    """
    config = model.config
    if total_frames <= seed_motion.num_frames:
        raise BadLength(f"total_frames {total_frames} must exceed the seed length {seed_motion.num_frames}")
    if not 1 <= stride <= config.n:
        raise ConfigError(f"stride {stride} outside 1..{config.n}")
    if seed_motion.num_frames < config.w_ctx:
        raise TooShort(f"seed motion needs at least w_ctx = {config.w_ctx} frames")
    history_max = history_max or get_settings().HISTORY_MAX

    model.eval()
    frames = [row for row in np.asarray(seed_motion.frames, dtype=np.float32)]
    logits: list[np.ndarray] = []
    completed, steps = True, 0
    with torch.no_grad():
        while len(frames) < total_frames:
            t = len(frames)
            context = np.stack(frames[t - config.w_ctx: t])
            window = beats.window(t - config.w_ctx, t + config.n)
            e_hist = model.history_embedding(np.stack(frames[max(0, t - history_max): t]))
            try:
                output = generate_step(model.generator, context, window, style, e_hist)
            except NonFiniteActivation as exc:
                logger.warning("rollout aborted at frame {}: {}", t, exc.detail)
                completed = False
                break
            take = min(stride, total_frames - t)
            frames.extend(output.poses[:take].cpu().numpy().astype(np.float32))
            logits.extend(output.contact_logits[:take].cpu().numpy())
            steps += 1

    clip = seed_motion.with_frames(np.stack(frames), clip_id=f"{seed_motion.clip_id}~rollout")
    if seed_motion.num_frames >= 2:
        seed_contacts = extract_foot_contacts(seed_motion).labels
    else:
        seed_contacts = np.zeros((seed_motion.num_frames, 2), dtype=np.uint8)
    generated = (np.asarray(logits).reshape(-1, 2) > 0.0).astype(np.uint8)
    contacts = ContactTrack(labels=np.concatenate([seed_contacts, generated], axis=0))
    return RolloutResult(clip=clip, contacts=contacts, completed=completed, steps=steps)
