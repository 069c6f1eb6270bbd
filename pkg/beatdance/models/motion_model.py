from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import BadRotation, BadStyle, DimensionMismatch, IoFailure, NonFiniteValue, TooShort

MUSIC_DIM = 32
ROTATION_TOLERANCE = 1e-3
MFCC_DIMS = 20
CHROMA_DIMS = 12


def _frozen_array(value, dtype) -> np.ndarray:
    array = np.array(value, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def pose_width(joint_count: int) -> int:
    return joint_count * 9 + 3


class MotionClip(BaseModel):
    """Pose sequence: per frame J flattened 3x3 rotations followed by the root position."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frames: np.ndarray
    fps: int = Field(default=20, gt=0)
    joint_count: int = Field(default=24, gt=0)
    style_label: int = Field(default=0, ge=0)
    clip_id: str = ""

    @field_validator("frames", mode="before")
    @classmethod
    def _as_float32(cls, value):
        array = _frozen_array(value, np.float32)
        if array.ndim != 2:
            raise DimensionMismatch(f"motion frames must be 2-D, got shape {array.shape}")
        if array.shape[0] < 1:
            raise TooShort("motion clip needs at least one frame")
        if not np.isfinite(array).all():
            raise NonFiniteValue("motion frames contain non-finite values")
        return array

    @model_validator(mode="after")
    def _check_width(self) -> "MotionClip":
        expected = pose_width(self.joint_count)
        if self.frames.shape[1] != expected:
            raise DimensionMismatch(
                f"row width {self.frames.shape[1]} != J*9+3 = {expected} for J={self.joint_count}"
            )
        return self

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def width(self) -> int:
        return int(self.frames.shape[1])

    @property
    def duration_s(self) -> float:
        return self.num_frames / self.fps

    def rotations(self) -> np.ndarray:
        """(T, J, 3, 3) view of the rotation blocks."""
        return self.frames[:, : self.joint_count * 9].reshape(self.num_frames, self.joint_count, 3, 3)

    def root(self) -> np.ndarray:
        return self.frames[:, self.joint_count * 9:]

    def rotation_error(self) -> float:
        """Largest ||R^T R - I||_F over all blocks; negative determinants report +inf."""
        rot = self.rotations().astype(np.float64)
        gram = np.einsum("tjki,tjkl->tjil", rot, rot) - np.eye(3)
        if (np.linalg.det(rot) <= 0).any():
            return float("inf")
        return float(np.sqrt((gram ** 2).sum(axis=(-2, -1))).max())

    def check_rotations(self, tolerance: float = ROTATION_TOLERANCE) -> "MotionClip":
        error = self.rotation_error()
        if not error < tolerance:
            raise BadRotation(
                f"{self.clip_id or 'clip'}: rotation blocks are not proper rotations "
                f"(max ||R^T R - I||_F = {error:.3g}, tolerance {tolerance:g})"
            )
        return self

    def slice(self, start: int, stop: int) -> "MotionClip":
        return self.model_copy(update={"frames": _frozen_array(self.frames[start:stop], np.float32)})

    def with_frames(self, frames: np.ndarray, **update) -> "MotionClip":
        return MotionClip(
            frames=frames,
            fps=update.get("fps", self.fps),
            joint_count=update.get("joint_count", self.joint_count),
            style_label=update.get("style_label", self.style_label),
            clip_id=update.get("clip_id", self.clip_id),
        )


class MusicFeatureTrack(BaseModel):
    """Per-frame music features: 20 MFCC-like then 12 chroma-like dimensions."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frames: np.ndarray
    fps: int = Field(default=20, gt=0)
    style_label: int = Field(default=0, ge=0)
    beat_annotation: Optional[np.ndarray] = None
    track_id: str = ""

    @field_validator("frames", mode="before")
    @classmethod
    def _as_float32(cls, value):
        array = _frozen_array(value, np.float32)
        if array.ndim != 2 or array.shape[1] != MUSIC_DIM:
            raise DimensionMismatch(f"music frames must be T x {MUSIC_DIM}, got {array.shape}")
        if array.shape[0] < 1:
            raise TooShort("music track needs at least one frame")
        if not np.isfinite(array).all():
            raise NonFiniteValue("music frames contain non-finite values")
        return array

    @field_validator("beat_annotation", mode="before")
    @classmethod
    def _as_flags(cls, value):
        if value is None:
            return None
        flags = _frozen_array(value, np.uint8)
        if flags.ndim != 1 or not np.isin(flags, (0, 1)).all():
            raise DimensionMismatch("beat annotation must be a binary vector")
        return flags

    @model_validator(mode="after")
    def _check_annotation(self) -> "MusicFeatureTrack":
        if self.beat_annotation is not None and len(self.beat_annotation) != self.num_frames:
            raise DimensionMismatch(
                f"beat annotation length {len(self.beat_annotation)} != {self.num_frames} frames"
            )
        return self

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    def slice(self, start: int, stop: int) -> "MusicFeatureTrack":
        annotation = None if self.beat_annotation is None else self.beat_annotation[start:stop]
        return MusicFeatureTrack(
            frames=self.frames[start:stop],
            fps=self.fps,
            style_label=self.style_label,
            beat_annotation=annotation,
            track_id=self.track_id,
        )


class ContactTrack(BaseModel):
    """Binary foot contacts per frame: column 0 left foot, column 1 right foot."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    labels: np.ndarray

    @field_validator("labels", mode="before")
    @classmethod
    def _as_binary(cls, value):
        labels = _frozen_array(value, np.uint8)
        if labels.ndim != 2 or labels.shape[1] != 2:
            raise DimensionMismatch(f"contact labels must be T x 2, got {labels.shape}")
        if not np.isin(labels, (0, 1)).all():
            raise DimensionMismatch("contact labels must be 0 or 1")
        return labels


class ManifestEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    motion: str
    music: str
    style: int = Field(ge=0)


class DatasetManifest(BaseModel):
    """Clip listing with a style vocabulary; paths are relative to the manifest file."""
    model_config = ConfigDict(extra="forbid")

    styles: list[str]
    clips: list[ManifestEntry]
    root: Optional[Path] = Field(default=None, exclude=True)

    @model_validator(mode="after")
    def _check_styles(self) -> "DatasetManifest":
        for entry in self.clips:
            if entry.style >= len(self.styles):
                raise BadStyle(f"clip {entry.id} has style {entry.style} outside the vocabulary")
        return self

    def resolve(self, relative: str) -> Path:
        path = Path(relative)
        if not path.is_absolute() and self.root is not None:
            path = self.root / path
        return path

    def check_paths(self) -> None:
        for entry in self.clips:
            for relative in (entry.motion, entry.music):
                if not self.resolve(relative).is_file():
                    raise IoFailure(f"manifest entry {entry.id}: missing file {relative}")
