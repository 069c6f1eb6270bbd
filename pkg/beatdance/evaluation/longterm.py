"""
Long-term robustness protocol: kinetic FID of short windows taken at regular anchors
along long generated clips, against the same windows cut from reference clips.

Anchors sit every ``anchor_s`` seconds starting at ``anchor_s``; only windows fully
inside a clip are kept, so a 60 s clip yields anchors 3, 6, ..., 57.
"""

from typing import Sequence

import numpy as np
from loguru import logger

from ..core.errors import TooShort
from ..models.motion_model import MotionClip, MusicFeatureTrack
from ..schemas.report_schemas import CurvePoint
from .features import kinetic_features
from .metrics import frechet_distance

MIN_CURVE_SECONDS = 60.0


def loop_track(track: MusicFeatureTrack, min_frames: int) -> MusicFeatureTrack:
    """Tile a music track (and its beat annotation) until it has at least ``min_frames`` frames."""
    if track.num_frames >= min_frames:
        return track
    repeats = -(-min_frames // track.num_frames)
    annotation = None
    if track.beat_annotation is not None:
        annotation = np.tile(track.beat_annotation, repeats)
    return MusicFeatureTrack(
        frames=np.tile(track.frames, (repeats, 1)),
        fps=track.fps,
        style_label=track.style_label,
        beat_annotation=annotation,
        track_id=track.track_id,
    )


def anchor_windows(clip: MotionClip, anchor_s: float, window_s: float) -> dict[int, MotionClip]:
    """Anchor index (1-based multiple of ``anchor_s``) -> centred window fully inside the clip."""
    width = int(round(window_s * clip.fps))
    half = width // 2
    windows = {}
    index = 1
    while True:
        centre = int(round(index * anchor_s * clip.fps))
        start = centre - half
        if start + width > clip.num_frames:
            break
        windows[index] = clip.slice(start, start + width)
        index += 1
    return windows


def longterm_fid_curve(
    generated: Sequence[MotionClip],
    reference: Sequence[MotionClip],
    anchor_s: float = 3.0,
    window_s: float = 1.0,
) -> list[CurvePoint]:
    for clip in generated:
        if clip.duration_s < MIN_CURVE_SECONDS:
            raise TooShort(f"clip {clip.clip_id} lasts {clip.duration_s:.1f} s, the curve needs 60 s")

    reference_windows = [
        kinetic_features(window).values
        for clip in reference
        for window in anchor_windows(clip, anchor_s, window_s).values()
    ]
    if len(reference_windows) < 2:
        raise TooShort("reference clips are too short to provide anchor windows")
    reference_features = np.stack(reference_windows)
    per_anchor: dict[int, list[np.ndarray]] = {}
    for clip in generated:
        for index, window in anchor_windows(clip, anchor_s, window_s).items():
            per_anchor.setdefault(index, []).append(kinetic_features(window).values)

    curve = []
    for index in sorted(per_anchor):
        samples = per_anchor[index]
        if len(samples) < 2:
            logger.debug("anchor {} has a single window; skipped", index)
            continue
        fid = frechet_distance(np.stack(samples), reference_features)
        curve.append(CurvePoint(t=index * anchor_s, fid_k=fid))
    return curve
