import json
from functools import lru_cache
from importlib import resources

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.errors import UnsupportedSkeleton

SKELETON_TABLES = {24: "skeleton_smpl24.json"}


class Skeleton(BaseModel):
    """Kinematic chain with unit-length bone offsets in the parent frame."""
    model_config = ConfigDict(frozen=True)

    name: str
    joint_count: int
    joint_names: list[str]
    parents: list[int]
    offsets: list[list[float]]
    mirror_pairs: list[tuple[int, int]]
    foot_joints: list[int]

    def mirror_permutation(self) -> np.ndarray:
        perm = np.arange(self.joint_count)
        for left, right in self.mirror_pairs:
            perm[left], perm[right] = right, left
        return perm


def _read_data(name: str) -> str:
    return resources.files("beatdance.data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_skeleton(joint_count: int = 24) -> Skeleton:
    table = SKELETON_TABLES.get(joint_count)
    if table is None:
        raise UnsupportedSkeleton(f"no skeleton table for J={joint_count}")
    return Skeleton.model_validate(json.loads(_read_data(table)))


@lru_cache(maxsize=None)
def load_style_names() -> tuple[str, ...]:
    return tuple(json.loads(_read_data("styles.json")))


def forward_kinematics(rotations: np.ndarray, root: np.ndarray, skeleton: Skeleton) -> np.ndarray:
    """Joint positions (T, J, 3) from local rotations (T, J, 3, 3) and root positions (T, 3)."""
    rotations = np.asarray(rotations, dtype=np.float64)
    frames = rotations.shape[0]
    offsets = np.asarray(skeleton.offsets, dtype=np.float64)
    global_rot = np.empty_like(rotations)
    positions = np.empty((frames, skeleton.joint_count, 3))
    for joint, parent in enumerate(skeleton.parents):
        if parent < 0:
            global_rot[:, joint] = rotations[:, joint]
            positions[:, joint] = root
            continue
        # parents are listed before children in the table
        global_rot[:, joint] = global_rot[:, parent] @ rotations[:, joint]
        positions[:, joint] = positions[:, parent] + global_rot[:, parent] @ offsets[joint]
    return positions


def clip_positions(clip) -> np.ndarray:
    """Forward kinematics for a MotionClip."""
    skeleton = load_skeleton(clip.joint_count)
    return forward_kinematics(clip.rotations(), clip.root().astype(np.float64), skeleton)
