"""
Procedural dance corpus standing in for a captured dataset.

Every joint angle is a periodic function of a *beat phase* whose time derivative
vanishes at each beat instant, so the aggregate joint speed dips to zero on the
beat. Style decides the amplitude, frequency and rest-pose tables; the seed only
jitters amplitudes and oscillation phases. Music features are a per-style
spectral signature plus band-limited noise and a decaying energy pulse on every
beat.
"""

import numpy as np
from scipy.ndimage import uniform_filter1d

from ..core.errors import BadStyle, ConfigError
from ..core.utils import make_rng
from ..models.motion_model import CHROMA_DIMS, MFCC_DIMS, MotionClip, MusicFeatureTrack
from .skeleton import load_skeleton, load_style_names

MIN_BPM, MAX_BPM = 60.0, 180.0
PULSE_DECAY_FRAMES = 1.5
NOISE_LEVEL = 0.05
ROOT_HEIGHT = 3.15  # pelvis height that puts the rest-pose feet at y = 0


def _rot_x(angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    one, zero = np.ones_like(angle), np.zeros_like(angle)
    return np.stack(
        [np.stack([one, zero, zero], -1), np.stack([zero, c, -s], -1), np.stack([zero, s, c], -1)],
        axis=-2,
    )


def _rot_z(angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    one, zero = np.ones_like(angle), np.zeros_like(angle)
    return np.stack(
        [np.stack([c, -s, zero], -1), np.stack([s, c, zero], -1), np.stack([zero, zero, one], -1)],
        axis=-2,
    )


def beat_frames(num_frames: int, fps: int, bpm: float) -> np.ndarray:
    period = 60.0 * fps / bpm
    count = int(np.floor((num_frames - 0.5) / period)) + 1
    frames = np.round(np.arange(count) * period).astype(np.int64)
    return frames[frames < num_frames]


def beat_phase(num_frames: int, fps: int, bpm: float) -> np.ndarray:
    """Eased beat count: advances by one per beat with zero derivative on each beat."""
    u = np.arange(num_frames, dtype=np.float64) * bpm / (60.0 * fps)
    return u - np.sin(2.0 * np.pi * u) / (2.0 * np.pi)


def _style_tables(style: int, joint_count: int) -> dict:
    rng = make_rng("style-table", style)
    scale = 0.35 + 0.5 * rng.random()
    return {
        "amplitude": scale * rng.uniform(0.2, 1.0, size=(joint_count, 2)),
        "cycles": rng.choice([0.25, 0.5, 1.0], size=joint_count),
        "phase": rng.uniform(0.0, 2.0 * np.pi, size=(joint_count, 2)),
        "rest": rng.normal(0.0, 0.25, size=(joint_count, 2)),
        "root_amplitude": rng.uniform(0.1, 0.6, size=3) * np.array([1.0, 0.3, 1.0]),
        "mfcc": rng.normal(0.0, 1.0, size=MFCC_DIMS),
        "chroma": rng.dirichlet(np.full(CHROMA_DIMS, 0.5)) * 3.0,
    }


def synth_dance(
    style: int,
    duration_s: float,
    bpm: float,
    seed: int,
    fps: int = 20,
    joint_count: int = 24,
) -> tuple[MotionClip, MusicFeatureTrack]:
    styles = load_style_names()
    if not 0 <= style < len(styles):
        raise BadStyle(f"style {style} not in 0..{len(styles) - 1}")
    if not MIN_BPM <= bpm <= MAX_BPM:
        raise ConfigError(f"bpm {bpm} outside [{MIN_BPM}, {MAX_BPM}]")
    load_skeleton(joint_count)

    num_frames = max(1, int(round(duration_s * fps)))
    tables = _style_tables(style, joint_count)
    rng = make_rng("synth", style, seed)

    # Motion
    phase = beat_phase(num_frames, fps, bpm)[:, None, None]
    amplitude = tables["amplitude"] * (1.0 + 0.1 * rng.standard_normal((joint_count, 2)))
    offsets = tables["phase"] + rng.uniform(0.0, 0.5, size=(joint_count, 2))
    cycles = tables["cycles"][None, :, None]
    angles = tables["rest"] + amplitude * np.sin(2.0 * np.pi * cycles * phase + offsets)
    rotations = _rot_z(angles[..., 0]) @ _rot_x(angles[..., 1])

    root_phase = 2.0 * np.pi * 0.25 * phase[:, 0, 0] + rng.uniform(0.0, 2.0 * np.pi)
    root = np.stack(
        [
            tables["root_amplitude"][0] * np.sin(root_phase),
            ROOT_HEIGHT + tables["root_amplitude"][1] * np.sin(2.0 * root_phase),
            tables["root_amplitude"][2] * np.cos(root_phase),
        ],
        axis=-1,
    )
    frames = np.concatenate([rotations.reshape(num_frames, -1), root], axis=1)
    clip_id = f"s{style}_seed{seed}"
    motion = MotionClip(
        frames=frames, fps=fps, joint_count=joint_count, style_label=style, clip_id=clip_id
    )

    # Music
    beats = beat_frames(num_frames, fps, bpm)
    annotation = np.zeros(num_frames, dtype=np.uint8)
    annotation[beats] = 1
    pulse = np.zeros(num_frames)
    for beat in beats:
        tail = np.arange(num_frames - beat)
        pulse[beat:] += np.exp(-tail / PULSE_DECAY_FRAMES)
    noise = uniform_filter1d(
        rng.standard_normal((num_frames, MFCC_DIMS + CHROMA_DIMS)), size=5, axis=0, mode="nearest"
    )
    signature = np.concatenate([tables["mfcc"], tables["chroma"]])
    features = signature[None, :] + NOISE_LEVEL * noise + pulse[:, None]
    music = MusicFeatureTrack(
        frames=features, fps=fps, style_label=style, beat_annotation=annotation, track_id=clip_id
    )
    return motion, music
