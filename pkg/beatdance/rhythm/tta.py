import numpy as np

from ..models.beat_model import BeatTrack, TTASequence


def default_cap(fps: int) -> int:
    return 2 * fps


def tta_encode(beats: BeatTrack, cap: int | None = None) -> TTASequence:
    """Frames until the next beat at or after each frame; ``cap`` when none is left."""
    cap = default_cap(beats.fps) if cap is None else cap
    length = len(beats)
    index = np.arange(length, dtype=np.int64)
    sentinel = np.iinfo(np.int64).max
    marked = np.where(beats.flags.astype(bool), index, sentinel)
    upcoming = np.minimum.accumulate(marked[::-1])[::-1] if length else marked
    values = np.where(upcoming == sentinel, cap, np.minimum(upcoming - index, cap))
    return TTASequence(values=values, cap=cap)
