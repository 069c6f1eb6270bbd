from .classifier import StyleClassifier, style_accuracy, style_features, train_style_classifier
from .features import FeatureKind, FeatureVec, feature_matrix, geometric_features, kinetic_features
from .longterm import anchor_windows, longterm_fid_curve, loop_track
from .metrics import beat_align, diversity, frechet_distance, shuffled_beat_align
from .report import evaluate_motion, mean_beat_align

__all__ = [
    "StyleClassifier",
    "style_accuracy",
    "style_features",
    "train_style_classifier",
    "FeatureKind",
    "FeatureVec",
    "feature_matrix",
    "geometric_features",
    "kinetic_features",
    "anchor_windows",
    "longterm_fid_curve",
    "loop_track",
    "beat_align",
    "diversity",
    "frechet_distance",
    "shuffled_beat_align",
    "evaluate_motion",
    "mean_beat_align",
]
