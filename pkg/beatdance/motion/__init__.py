from .augment import mirror_motion, orthonormalize_rotations
from .contacts import extract_foot_contacts, foot_speeds, threshold_contacts
from .io import load_manifest, load_motion, load_music, save_manifest, save_motion, save_music
from .skeleton import clip_positions, forward_kinematics, load_skeleton, load_style_names
from .synth import beat_frames, synth_dance

__all__ = [
    "mirror_motion",
    "orthonormalize_rotations",
    "extract_foot_contacts",
    "foot_speeds",
    "threshold_contacts",
    "load_manifest",
    "load_motion",
    "load_music",
    "save_manifest",
    "save_motion",
    "save_music",
    "clip_positions",
    "forward_kinematics",
    "load_skeleton",
    "load_style_names",
    "beat_frames",
    "synth_dance",
]
