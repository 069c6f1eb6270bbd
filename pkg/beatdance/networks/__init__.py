from .dancer import DanceModel, RolloutResult, rollout
from .generator import (
    ConditionalLayerNorm,
    MotionGenerator,
    MultimodalGate,
    cln,
    generate_step,
    mag_alpha,
    mag_fuse,
    pad_motion,
)
from .long_history import LongHistoryEncoder, encode_history, sample_training_history
from .style_encoder import (
    StyleEncoder,
    StyleEncoders,
    encode_motion,
    encode_music,
    style_embedding,
    triplet_hinge,
    triplet_loss,
)

__all__ = [
    "DanceModel",
    "RolloutResult",
    "rollout",
    "ConditionalLayerNorm",
    "MotionGenerator",
    "MultimodalGate",
    "cln",
    "generate_step",
    "mag_alpha",
    "mag_fuse",
    "pad_motion",
    "LongHistoryEncoder",
    "encode_history",
    "sample_training_history",
    "StyleEncoder",
    "StyleEncoders",
    "encode_motion",
    "encode_music",
    "style_embedding",
    "triplet_hinge",
    "triplet_loss",
]
