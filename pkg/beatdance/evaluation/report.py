from typing import Mapping, Optional, Sequence

import numpy as np
from loguru import logger

from ..core.errors import EmptyBeatSet, TooFew, TooFewClips
from ..models.beat_model import BeatTrack
from ..models.motion_model import MotionClip
from ..rhythm.beats import motion_beats
from ..schemas.report_schemas import EvaluationReport
from .classifier import StyleClassifier, style_accuracy, train_style_classifier
from .features import FeatureKind, feature_matrix
from .longterm import MIN_CURVE_SECONDS, longterm_fid_curve
from .metrics import beat_align, diversity, frechet_distance, shuffled_beat_align


def mean_beat_align(
    clips: Sequence[MotionClip], music_beats: Mapping[str, BeatTrack], sigma: float = 1.0
) -> tuple[Optional[float], Optional[float]]:
    """(aligned, shuffled) beat alignment over clips that have conditioning beats."""
    kinetic_sets, music_sets = [], []
    for clip in clips:
        beats = music_beats.get(clip.clip_id)
        if beats is None:
            continue
        kinetic_sets.append(motion_beats(clip).times())
        music_sets.append(beats.times())
    scores = [
        beat_align(k, m, sigma) for k, m in zip(kinetic_sets, music_sets) if len(k) and len(m)
    ]
    if not scores:
        logger.warning("no clip has both kinematic and music beats; beat alignment skipped")
        return None, None
    try:
        shuffled = shuffled_beat_align(kinetic_sets, music_sets, sigma=sigma)
    except (TooFew, EmptyBeatSet) as exc:
        logger.info("shuffled beat alignment skipped: {}", exc.detail)
        shuffled = None
    return float(np.mean(scores)), shuffled


def evaluate_motion(
    generated: Sequence[MotionClip],
    reference: Sequence[MotionClip],
    music_beats: Optional[Mapping[str, BeatTrack]] = None,
    classifier: Optional[StyleClassifier] = None,
) -> EvaluationReport:
    kinetic_gen = feature_matrix(list(generated), FeatureKind.KINETIC)
    kinetic_ref = feature_matrix(list(reference), FeatureKind.KINETIC)
    geometric_gen = feature_matrix(list(generated), FeatureKind.GEOMETRIC)
    geometric_ref = feature_matrix(list(reference), FeatureKind.GEOMETRIC)

    aligned, shuffled = (None, None)
    if music_beats:
        aligned, shuffled = mean_beat_align(generated, music_beats)

    if classifier is None:
        try:
            classifier = train_style_classifier(reference)
        except TooFewClips as exc:
            logger.info("style accuracy skipped: {}", exc.detail)
    style_acc = None
    if classifier is not None:
        style_acc = style_accuracy(classifier, generated, [clip.style_label for clip in generated])

    curve = []
    if all(clip.duration_s >= MIN_CURVE_SECONDS for clip in generated):
        curve = longterm_fid_curve(generated, reference)
    else:
        logger.info("long-term curve skipped: generated clips shorter than {} s", MIN_CURVE_SECONDS)

    return EvaluationReport(
        fid_k=frechet_distance(kinetic_gen, kinetic_ref),
        fid_g=frechet_distance(geometric_gen, geometric_ref),
        dist_k=diversity(kinetic_gen),
        dist_g=diversity(geometric_gen),
        beat_align=aligned,
        beat_align_shuffled=shuffled,
        style_acc=style_acc,
        curve=curve,
        generated_count=len(generated),
        reference_count=len(reference),
    )
