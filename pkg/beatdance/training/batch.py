"""
Training batch construction.

A target window of w_ctx + n frames is cut from a random clip; its beat context is
motion_beats of that window. Style exemplars and the long-history slice are drawn by
style label from other clips, so no music is ever aligned with the target motion.
The ``paired`` scheme swaps in the target's own music and motion, aligned to end with
the context window.
"""

from typing import Optional

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict

from ..core.errors import NoEligibleClip
from ..core.utils import make_rng
from ..models.motion_model import MotionClip, MusicFeatureTrack
from ..networks.long_history import sample_training_history
from ..rhythm.beats import motion_beats
from ..rhythm.tta import tta_encode
from ..schemas.config_schemas import RunConfig
from .dataset import DanceDataset


class TrainBatch(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    context: np.ndarray  # (B, w_ctx, D)
    future: np.ndarray  # (B, n, D)
    beats: np.ndarray  # (B, w_ctx + n) motion-beat flags of the target window
    tta: np.ndarray  # (B, w_ctx + n)
    contacts: np.ndarray  # (B, n, 2)
    music_exemplar: np.ndarray  # (B, w_style, 32)
    motion_exemplar: np.ndarray  # (B, w_style, D)
    history: Optional[np.ndarray] = None  # (B, history_len, D)
    styles: list[int]
    target_ids: list[str]
    target_starts: list[int]
    music_ids: list[str]
    motion_ids: list[str]
    history_ids: list[str] = []

    def tensors(self, dtype: torch.dtype = torch.float32) -> dict[str, Optional[torch.Tensor]]:
        def as_float(array):
            return None if array is None else torch.from_numpy(np.ascontiguousarray(array)).to(dtype)

        return {
            "context": as_float(self.context),
            "future": as_float(self.future),
            "tta": torch.from_numpy(np.ascontiguousarray(self.tta)).long(),
            "contacts": as_float(self.contacts),
            "music_exemplar": as_float(self.music_exemplar),
            "motion_exemplar": as_float(self.motion_exemplar),
            "history": as_float(self.history),
        }


class TripletBatch(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    anchor: np.ndarray
    positive: np.ndarray
    negative: np.ndarray
    anchor_ids: list[str]
    positive_ids: list[str]
    negative_ids: list[str]


def _random_slice(frames: np.ndarray, length: int, rng: np.random.Generator) -> np.ndarray:
    start = int(rng.integers(frames.shape[0] - length + 1))
    return frames[start: start + length]


def _pick(pool: list, rng: np.random.Generator, what: str):
    if not pool:
        raise NoEligibleClip(f"no eligible clip for the {what}")
    return pool[int(rng.integers(len(pool)))]


def _aligned_slice(frames: np.ndarray, stop: int, length: int) -> np.ndarray:
    """``length`` frames ending at ``stop``; the first frame repeats when that would start before 0."""
    stop = min(stop, frames.shape[0])
    piece = frames[max(0, stop - length): stop]
    if piece.shape[0] < length:
        piece = np.concatenate([np.repeat(piece[:1], length - piece.shape[0], axis=0), piece])
    return piece


def build_batch(dataset: DanceDataset, config: RunConfig, batch_size: int, seed: int) -> TrainBatch:
    model, train = config.model, config.train
    span = model.w_ctx + model.n
    rng = make_rng("batch", seed)
    targets = [clip for clip in dataset.motions if clip.num_frames >= max(span, model.w_style)]
    if not targets:
        raise NoEligibleClip(f"no clip has the {span} frames a training window needs")

    fields: dict[str, list] = {key: [] for key in TrainBatch.model_fields}
    fields["history"] = []
    for _ in range(batch_size):
        target: MotionClip = _pick(targets, rng, "target window")
        start = int(rng.integers(target.num_frames - span + 1))
        window = target.slice(start, start + span)
        beats = motion_beats(window)
        style = target.style_label

        if train.scheme == "paired":
            music: MusicFeatureTrack = dataset.aligned_music(target.clip_id)
            music_slice = _aligned_slice(music.frames, start + model.w_ctx, model.w_style)
            motion_source = target
            motion_slice = _aligned_slice(target.frames, start + model.w_ctx, model.w_style)
        else:
            long_enough = lambda item: item.num_frames >= model.w_style  # noqa: E731
            music = _pick(
                [t for t in dataset.music_of_style(style, exclude=target.clip_id) if long_enough(t)],
                rng,
                f"music exemplar of style {style}",
            )
            music_slice = _random_slice(music.frames, model.w_style, rng)
            motion_source = _pick(
                [c for c in dataset.clips_of_style(style, exclude=target.clip_id) if long_enough(c)],
                rng,
                f"motion exemplar of style {style}",
            )
            motion_slice = _random_slice(motion_source.frames, model.w_style, rng)

        if model.long_history == "on":
            history = sample_training_history(style, dataset, train.history_len, rng=rng)
            fields["history"].append(history.frames)
            fields["history_ids"].append(history.clip_id)

        contacts = dataset.contacts(target).labels[start + model.w_ctx: start + span]
        fields["context"].append(window.frames[: model.w_ctx])
        fields["future"].append(window.frames[model.w_ctx:])
        fields["beats"].append(beats.flags)
        fields["tta"].append(tta_encode(beats, model.tta_cap).values)
        fields["contacts"].append(contacts)
        fields["music_exemplar"].append(music_slice)
        fields["motion_exemplar"].append(motion_slice)
        fields["styles"].append(style)
        fields["target_ids"].append(target.clip_id)
        fields["target_starts"].append(start)
        fields["music_ids"].append(music.track_id)
        fields["motion_ids"].append(motion_source.clip_id)

    arrays = {
        key: np.stack(fields[key])
        for key in ("context", "future", "beats", "tta", "contacts", "music_exemplar", "motion_exemplar")
    }
    history = np.stack(fields["history"]) if fields["history"] else None
    return TrainBatch(
        **arrays,
        history=history,
        styles=fields["styles"],
        target_ids=fields["target_ids"],
        target_starts=fields["target_starts"],
        music_ids=fields["music_ids"],
        motion_ids=fields["motion_ids"],
        history_ids=fields["history_ids"],
    )


def build_triplets(dataset: DanceDataset, count: int, window: int, seed: int) -> Optional[TripletBatch]:
    """Music (anchor, same-style positive, other-style negative) exemplars.

    Returns None when fewer than two styles have music.
    """
    rng = make_rng("triplet", seed)
    styles = [
        s for s in dataset.present_styles()
        if any(t.num_frames >= window for t in dataset.music_of_style(s))
    ]
    if len(styles) < 2:
        return None
    picked: dict[str, list] = {key: [] for key in TripletBatch.model_fields}
    for _ in range(count):
        style = styles[int(rng.integers(len(styles)))]
        anchor = _pick([t for t in dataset.music_of_style(style) if t.num_frames >= window], rng, "anchor")
        positives = [
            t for t in dataset.music_of_style(style, exclude=anchor.track_id) if t.num_frames >= window
        ]
        positive = _pick(positives, rng, f"positive of style {style}") if positives else anchor
        other = [s for s in styles if s != style]
        negative_style = other[int(rng.integers(len(other)))]
        negative = _pick(
            [t for t in dataset.music_of_style(negative_style) if t.num_frames >= window], rng, "negative"
        )
        for key, track in (("anchor", anchor), ("positive", positive), ("negative", negative)):
            picked[key].append(_random_slice(track.frames, window, rng))
            picked[f"{key}_ids"].append(track.track_id)
    return TripletBatch(
        anchor=np.stack(picked["anchor"]),
        positive=np.stack(picked["positive"]),
        negative=np.stack(picked["negative"]),
        anchor_ids=picked["anchor_ids"],
        positive_ids=picked["positive_ids"],
        negative_ids=picked["negative_ids"],
    )
