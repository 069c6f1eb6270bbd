import json

import numpy as np

from beatdance.models import MotionClip
from beatdance.motion import load_style_names, synth_dance


def last_json(output: str) -> dict:
    """The last JSON object line a command printed."""
    lines = [line for line in output.splitlines() if line.startswith("{")]
    assert lines, output
    return json.loads(lines[-1])


def identity_clip(frames: int, joint_count: int = 24, style: int = 0, clip_id: str = "still") -> MotionClip:
    """Rest pose (identity rotations) at a fixed root."""
    rotations = np.tile(np.eye(3, dtype=np.float32).reshape(-1), (frames, joint_count))
    root = np.tile(np.array([0.0, 3.15, 0.0], dtype=np.float32), (frames, 1))
    return MotionClip(
        frames=np.concatenate([rotations, root], axis=1),
        joint_count=joint_count,
        style_label=style,
        clip_id=clip_id,
    )


def style_names(count: int) -> list[str]:
    return list(load_style_names()[:count])


def synth_corpus(styles: int = 2, clips_per_style: int = 3, seconds: float = 4.0, bpm: float = 120.0):
    """In-memory synthetic clips with ids ``s<style>_<index>``."""
    motions, musics = [], []
    for style in range(styles):
        for index in range(clips_per_style):
            motion, music = synth_dance(style, seconds, bpm, seed=index)
            clip_id = f"s{style}_{index}"
            motions.append(motion.model_copy(update={"clip_id": clip_id}))
            musics.append(music.model_copy(update={"track_id": clip_id}))
    return motions, musics
