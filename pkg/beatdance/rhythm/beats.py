"""
Beat identification from motion (pauses in aggregate joint speed) and from music
features (peaks of positive spectral flux).
"""

import numpy as np

from ..core.errors import TooShort
from ..models.beat_model import BeatTrack
from ..models.motion_model import MotionClip, MusicFeatureTrack
from ..motion.skeleton import clip_positions

DEFAULT_MIN_SEPARATION = 4
DEFAULT_PROMINENCE = 0.5
DEFAULT_ONSET_K = 1.0
FLAT_TOLERANCE = 1e-6


def _enforce_separation(candidates: np.ndarray, min_separation: int) -> list[int]:
    kept: list[int] = []
    for frame in candidates:
        if not kept or frame - kept[-1] >= min_separation:
            kept.append(int(frame))
    return kept


def motion_speed(clip: MotionClip) -> np.ndarray:
    """Aggregate speed s_t: mean over joints of central-difference positional speed."""
    if clip.num_frames < 3:
        raise TooShort("motion beats need at least three frames")
    positions = clip_positions(clip)
    velocity = np.gradient(positions, axis=0)
    return np.linalg.norm(velocity, axis=-1).mean(axis=1)


def speed_beats(
    speed: np.ndarray,
    neighborhood: int,
    min_separation: int = DEFAULT_MIN_SEPARATION,
    prominence: float = DEFAULT_PROMINENCE,
) -> list[int]:
    """Frames where ``speed`` has a prominent strict local minimum.

    The sequence is reflected at both ends so the first and last frames can qualify.
    """
    speed = np.asarray(speed, dtype=np.float64)
    frames = len(speed)
    padded = np.pad(speed, 1, mode="reflect")
    strict_min = (speed < padded[:-2]) & (speed < padded[2:])

    candidates = []
    for t in np.flatnonzero(strict_min):
        lo, hi = max(0, t - neighborhood), min(frames, t + neighborhood + 1)
        window = speed[lo:hi]
        mean, std = window.mean(), window.std()
        if std <= FLAT_TOLERANCE * max(mean, np.finfo(np.float64).tiny):
            continue
        if speed[t] <= mean - prominence * std:
            candidates.append(t)
    return _enforce_separation(np.asarray(candidates, dtype=np.int64), min_separation)


def motion_beats(
    clip: MotionClip,
    min_separation: int = DEFAULT_MIN_SEPARATION,
    prominence: float = DEFAULT_PROMINENCE,
) -> BeatTrack:
    speed = motion_speed(clip)
    frames = speed_beats(speed, max(1, clip.fps // 2), min_separation, prominence)
    return BeatTrack.from_frames(frames, clip.num_frames, clip.fps)


def music_novelty(track: MusicFeatureTrack) -> np.ndarray:
    """Summed positive feature increments; frame 0 has no predecessor and reads 0."""
    if track.num_frames < 2:
        raise TooShort("music onsets need at least two frames")
    features = track.frames.astype(np.float64)
    novelty = np.zeros(track.num_frames)
    novelty[1:] = np.maximum(np.diff(features, axis=0), 0.0).sum(axis=1)
    return novelty


def music_onsets(
    track: MusicFeatureTrack,
    min_separation: int = DEFAULT_MIN_SEPARATION,
    k: float = DEFAULT_ONSET_K,
) -> BeatTrack:
    novelty = music_novelty(track)
    padded = np.pad(novelty, 1, mode="reflect")
    peaks = (novelty > padded[:-2]) & (novelty >= padded[2:])
    threshold = novelty.mean() + k * novelty.std()
    candidates = np.flatnonzero(peaks & (novelty > threshold))
    frames = _enforce_separation(candidates, min_separation)
    return BeatTrack.from_frames(frames, track.num_frames, track.fps)
