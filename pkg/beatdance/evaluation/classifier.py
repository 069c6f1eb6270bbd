from collections import Counter
from typing import Optional, Sequence

import numpy as np
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import Pipeline, make_pipeline
from sklearn.preprocessing import StandardScaler

from ..core.errors import TooFewClips
from ..models.motion_model import MotionClip
from .features import geometric_features, kinetic_features

MIN_STYLES = 2
MIN_CLIPS_PER_STYLE = 4


def style_features(clip: MotionClip) -> np.ndarray:
    """Kinetic and geometric features side by side."""
    return np.concatenate([kinetic_features(clip).values, geometric_features(clip).values])


def _windows(clip: MotionClip, window: Optional[int]) -> list[MotionClip]:
    if window is None or clip.num_frames < 2 * window:
        return [clip]
    return [clip.slice(start, start + window) for start in range(0, clip.num_frames - window + 1, window)]


class StyleClassifier:
    """Standardised features into multinomial logistic regression."""

    def __init__(self, pipeline: Pipeline, window: Optional[int] = None):
        self.pipeline = pipeline
        self.window = window

    @property
    def classes(self) -> list[int]:
        return [int(c) for c in self.pipeline.classes_]

    def predict(self, clips: Sequence[MotionClip]) -> np.ndarray:
        return self.pipeline.predict(np.stack([style_features(clip) for clip in clips]))


def train_style_classifier(
    clips: Sequence[MotionClip], window: Optional[int] = None, seed: int = 0
) -> StyleClassifier:
    """Fit on labelled clips; with ``window`` each long clip is cut into non-overlapping windows."""
    counts = Counter(clip.style_label for clip in clips)
    if len(counts) < MIN_STYLES or min(counts.values()) < MIN_CLIPS_PER_STYLE:
        raise TooFewClips(
            f"style classifier needs {MIN_STYLES}+ styles with {MIN_CLIPS_PER_STYLE}+ clips each, got {dict(counts)}"
        )
    samples = [piece for clip in clips for piece in _windows(clip, window)]
    features = np.stack([style_features(piece) for piece in samples])
    labels = np.array([piece.style_label for piece in samples])
    pipeline = make_pipeline(StandardScaler(), LogisticRegression(max_iter=2000, random_state=seed))
    pipeline.fit(features, labels)
    return StyleClassifier(pipeline, window)


def style_accuracy(classifier: StyleClassifier, clips: Sequence[MotionClip], labels: Sequence[int]) -> float:
    if not clips:
        return 0.0
    predicted = classifier.predict(clips)
    return float(np.mean(predicted == np.asarray(labels)))
