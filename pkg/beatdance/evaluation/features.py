"""
Self-contained motion feature extractors.

Kinetic: per joint (positions relative to the root) mean speed, mean acceleration
magnitude and speed variance, then the same three statistics for the root.
Units are feature-units per frame. Geometric: time-averaged boolean relations
listed in ``beatdance/data/geometric_relations.json``.
"""

import json
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..core.errors import NonFiniteValue, TooShort
from ..models.motion_model import MotionClip
from ..motion.skeleton import clip_positions


class FeatureKind(str, Enum):
    KINETIC = "kinetic"
    GEOMETRIC = "geometric"


class FeatureVec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: FeatureKind
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _finite(cls, value):
        values = np.array(value, dtype=np.float64).reshape(-1)
        if not np.isfinite(values).all():
            raise NonFiniteValue("feature vector contains non-finite values")
        values.setflags(write=False)
        return values


class GeometricRelation(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    kind: Literal["above", "closer", "farther", "crossed", "in_front"]
    joints: list[int]
    threshold: float = 0.0
    description: Optional[str] = Field(default=None)


@lru_cache(maxsize=None)
def load_relations() -> tuple[GeometricRelation, ...]:
    text = resources.files("beatdance.data").joinpath("geometric_relations.json").read_text("utf-8")
    return tuple(GeometricRelation.model_validate(item) for item in json.loads(text))


def _motion_stats(positions: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """positions (T, K, 3) -> mean speed, mean acceleration magnitude, speed variance per point."""
    speed = np.linalg.norm(np.diff(positions, axis=0), axis=-1)
    accel = np.linalg.norm(np.diff(positions, n=2, axis=0), axis=-1)
    return speed.mean(axis=0), accel.mean(axis=0), speed.var(axis=0)


def kinetic_features(clip: MotionClip) -> FeatureVec:
    if clip.num_frames < 3:
        raise TooShort("kinetic features need at least three frames")
    positions = clip_positions(clip)
    local = positions - positions[:, :1]
    root = positions[:, :1]
    joint_stats = _motion_stats(local)
    root_stats = _motion_stats(root)
    values = np.concatenate([*joint_stats, *(s.reshape(1) for s in root_stats)])
    return FeatureVec(kind=FeatureKind.KINETIC, values=values)


def _relation_flags(positions: np.ndarray, relation: GeometricRelation) -> np.ndarray:
    p = positions
    j = relation.joints
    if relation.kind == "above":
        return p[:, j[0], 1] > p[:, j[1], 1] + relation.threshold
    if relation.kind == "in_front":
        return p[:, j[0], 2] > p[:, j[1], 2] + relation.threshold
    if relation.kind == "crossed":
        # left joints sit at +x in the rest pose
        return p[:, j[0], 0] < p[:, j[1], 0]
    first = np.linalg.norm(p[:, j[0]] - p[:, j[1]], axis=-1)
    second = np.linalg.norm(p[:, j[2]] - p[:, j[3]], axis=-1)
    return first < second if relation.kind == "closer" else first > second


def geometric_features(clip: MotionClip) -> FeatureVec:
    positions = clip_positions(clip)
    values = [_relation_flags(positions, relation).mean() for relation in load_relations()]
    return FeatureVec(kind=FeatureKind.GEOMETRIC, values=np.asarray(values))


def feature_matrix(clips: list[MotionClip], kind: FeatureKind) -> np.ndarray:
    extract = kinetic_features if kind == FeatureKind.KINETIC else geometric_features
    return np.stack([extract(clip).values for clip in clips])
