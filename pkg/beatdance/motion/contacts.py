import numpy as np

from ..core.errors import TooShort
from ..models.motion_model import ContactTrack, MotionClip
from .skeleton import clip_positions, load_skeleton

DEFAULT_SPEED_THRESHOLD = 0.01


def threshold_contacts(foot_speeds: np.ndarray, speed_threshold: float) -> ContactTrack:
    """Label a foot in contact wherever its speed is below the threshold."""
    return ContactTrack(labels=(np.asarray(foot_speeds) < speed_threshold).astype(np.uint8))


def foot_speeds(clip: MotionClip) -> np.ndarray:
    """Per-frame positional speed (feature units / frame) of each foot; frame 0 copies frame 1."""
    if clip.num_frames < 2:
        raise TooShort("foot contacts need at least two frames")
    skeleton = load_skeleton(clip.joint_count)
    feet = clip_positions(clip)[:, skeleton.foot_joints]
    speeds = np.linalg.norm(np.diff(feet, axis=0), axis=-1)
    return np.concatenate([speeds[:1], speeds], axis=0)


def extract_foot_contacts(
    clip: MotionClip, speed_threshold: float = DEFAULT_SPEED_THRESHOLD
) -> ContactTrack:
    return threshold_contacts(foot_speeds(clip), speed_threshold)
