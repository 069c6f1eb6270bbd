import numpy as np

from ..models.motion_model import MotionClip
from .skeleton import load_skeleton

# S = diag(-1, 1, 1); S R S flips the sign of entries that mix x with y/z
_MIRROR_SIGNS = np.outer([-1.0, 1.0, 1.0], [-1.0, 1.0, 1.0]).astype(np.float32)


def mirror_motion(clip: MotionClip) -> MotionClip:
    """Reflect a clip through the x = 0 plane, swapping left and right joints."""
    skeleton = load_skeleton(clip.joint_count)
    perm = skeleton.mirror_permutation()

    rotations = clip.rotations()[:, perm] * _MIRROR_SIGNS
    root = clip.root() * np.array([-1.0, 1.0, 1.0], dtype=np.float32)
    frames = np.concatenate(
        [rotations.reshape(clip.num_frames, -1), root], axis=1
    ).astype(np.float32)
    return clip.with_frames(frames, clip_id=f"{clip.clip_id}~mirror")


def orthonormalize_rotations(clip: MotionClip) -> MotionClip:
    """Replace every rotation block by its closest rotation (polar decomposition).

    Export-only; generated poses are not projected during training or evaluation.
    """
    rot = clip.rotations().astype(np.float64)
    u, _, vt = np.linalg.svd(rot)
    det = np.linalg.det(u @ vt)
    # flip the last singular direction where the polar factor is a reflection
    u[..., :, -1] *= np.where(det < 0, -1.0, 1.0)[..., None]
    fixed = (u @ vt).reshape(clip.num_frames, -1)
    frames = np.concatenate([fixed, clip.root()], axis=1).astype(np.float32)
    return clip.with_frames(frames)
