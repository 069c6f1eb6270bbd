from .beat_model import BeatTrack, TTASequence
from .embedding_model import GeneratorOutput, LongHistoryEmbedding, StyleEmbedding
from .motion_model import (
    CHROMA_DIMS,
    MFCC_DIMS,
    MUSIC_DIM,
    ContactTrack,
    DatasetManifest,
    ManifestEntry,
    MotionClip,
    MusicFeatureTrack,
    pose_width,
)

__all__ = [
    "BeatTrack",
    "TTASequence",
    "GeneratorOutput",
    "LongHistoryEmbedding",
    "StyleEmbedding",
    "CHROMA_DIMS",
    "MFCC_DIMS",
    "MUSIC_DIM",
    "ContactTrack",
    "DatasetManifest",
    "ManifestEntry",
    "MotionClip",
    "MusicFeatureTrack",
    "pose_width",
]
