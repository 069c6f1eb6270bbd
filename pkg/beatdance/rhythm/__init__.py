from .beats import motion_beats, motion_speed, music_novelty, music_onsets, speed_beats
from .tta import default_cap, tta_encode

__all__ = [
    "motion_beats",
    "motion_speed",
    "music_novelty",
    "music_onsets",
    "speed_beats",
    "default_cap",
    "tta_encode",
]
