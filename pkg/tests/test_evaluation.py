import numpy as np
import pytest
from scipy.stats import spearmanr

from beatdance.core.errors import EmptyBeatSet, NonFiniteValue, TooFew, TooFewClips, TooShort
from beatdance.evaluation import (
    FeatureKind,
    FeatureVec,
    anchor_windows,
    beat_align,
    diversity,
    evaluate_motion,
    feature_matrix,
    frechet_distance,
    geometric_features,
    kinetic_features,
    longterm_fid_curve,
    loop_track,
    shuffled_beat_align,
    style_accuracy,
    train_style_classifier,
)
from beatdance.evaluation.features import load_relations
from beatdance.models import BeatTrack, MusicFeatureTrack
from beatdance.motion import synth_dance

from .helpers import identity_clip, synth_corpus


def long_clips(count: int, first_seed: int, seconds: float = 60.0):
    return [synth_dance(style=0, duration_s=seconds, bpm=80.0, seed=first_seed + i)[0] for i in range(count)]


class TestFrechetDistance:

    def test_identical_sets(self):
        samples = np.random.default_rng(0).normal(size=(50, 6))
        assert frechet_distance(samples, samples) < 1e-6

    def test_mean_shift_in_one_dimension(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=(10_000, 1)), rng.normal(1.0, 1.0, size=(10_000, 1))
        assert frechet_distance(a, b) == pytest.approx(1.0, abs=0.1)

    def test_pure_translation(self):
        samples = np.random.default_rng(1).normal(size=(200, 1))
        assert frechet_distance(samples, samples + 1.0) == pytest.approx(1.0, abs=1e-6)

    def test_variance_only_difference(self):
        a = np.array([[-1.0], [1.0]])
        b = np.array([[-2.0], [2.0]])
        assert frechet_distance(a, b) == pytest.approx(1.0, abs=1e-5)

    def test_is_symmetric(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=(30, 4)), rng.normal(1.0, 2.0, size=(40, 4))
        assert frechet_distance(a, b) == pytest.approx(frechet_distance(b, a), rel=1e-6)

    def test_accepts_feature_vectors(self):
        vecs = [FeatureVec(kind=FeatureKind.KINETIC, values=[float(i), 0.0]) for i in range(4)]
        assert frechet_distance(vecs, vecs) < 1e-6

    def test_needs_two_samples(self):
        with pytest.raises(TooFew):
            frechet_distance(np.zeros((1, 3)), np.zeros((5, 3)))


class TestDiversity:

    def test_single_pair(self):
        assert diversity(np.array([[0.0, 0.0], [3.0, 4.0]])) == pytest.approx(5.0)

    def test_mean_over_pairs(self):
        assert diversity(np.array([[0.0], [1.0], [3.0]])) == pytest.approx((1.0 + 3.0 + 2.0) / 3)

    def test_needs_two_vectors(self):
        with pytest.raises(TooFew):
            diversity(np.zeros((1, 3)))


class TestBeatAlign:

    def test_two_seconds_off(self):
        assert beat_align([2.0], [4.0]) == pytest.approx(np.exp(-2.0), abs=1e-9)

    def test_perfect_alignment(self):
        assert beat_align([0.5, 1.5], [0.5, 1.0, 1.5]) == pytest.approx(1.0)

    def test_empty_sets(self):
        with pytest.raises(EmptyBeatSet):
            beat_align([], [1.0])
        with pytest.raises(EmptyBeatSet):
            beat_align([1.0], [])

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            kinetic = rng.uniform(0, 20, size=rng.integers(1, 15))
            music = rng.uniform(0, 20, size=rng.integers(1, 15))
            sigma = rng.uniform(0.2, 2.0)
            expected = np.mean([
                np.exp(-min((k - m) ** 2 for m in music) / (2 * sigma ** 2)) for k in kinetic
            ])
            assert beat_align(kinetic, music, sigma) == pytest.approx(expected, abs=1e-9)

    def test_shuffled_pairs_with_other_music(self):
        kinetic = [np.array([1.0]), np.array([5.0])]
        music = [np.array([1.0]), np.array([5.0])]
        assert shuffled_beat_align(kinetic, music) == pytest.approx(np.exp(-8.0))

    def test_shuffled_needs_two_clips(self):
        with pytest.raises(TooFew):
            shuffled_beat_align([np.array([1.0])], [np.array([1.0])])


class TestFeatures:

    def test_still_pose_has_zero_kinetics(self):
        values = kinetic_features(identity_clip(10)).values
        assert values.shape == (24 * 3 + 3,)
        assert not values.any()

    def test_root_speed(self):
        clip = identity_clip(10)
        frames = np.array(clip.frames)
        frames[:, -3] = 0.5 * np.arange(10, dtype=np.float32)
        values = kinetic_features(clip.with_frames(frames)).values
        np.testing.assert_allclose(values[72:], [0.5, 0.0, 0.0], atol=1e-6)
        np.testing.assert_allclose(values[:72], 0.0, atol=1e-5)

    def test_kinetic_needs_three_frames(self):
        with pytest.raises(TooShort):
            kinetic_features(identity_clip(2))

    def test_geometric_values_are_fractions(self):
        clip, _ = synth_dance(style=2, duration_s=3.0, bpm=110.0, seed=0)
        values = geometric_features(clip).values
        assert values.shape == (len(load_relations()),)
        assert ((values >= 0.0) & (values <= 1.0)).all()

    def test_hands_raised_above_the_head(self):
        quarter = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], dtype=np.float32)
        frames = np.array(identity_clip(5).frames)
        frames[:, 16 * 9: 17 * 9] = quarter.reshape(-1)
        frames[:, 17 * 9: 18 * 9] = quarter.T.reshape(-1)
        values = geometric_features(identity_clip(5).with_frames(frames)).values
        names = [relation.name for relation in load_relations()]
        assert values[names.index("left_hand_above_head")] == 1.0
        assert values[names.index("right_hand_above_head")] == 1.0

    def test_geometric_self_concatenation(self):
        clip, _ = synth_dance(style=1, duration_s=3.0, bpm=100.0, seed=4)
        doubled = clip.with_frames(np.concatenate([clip.frames, clip.frames]))
        np.testing.assert_allclose(geometric_features(doubled).values, geometric_features(clip).values, atol=1e-12)

    def test_feature_matrix(self):
        motions, _ = synth_corpus(clips_per_style=2)
        assert feature_matrix(motions, FeatureKind.KINETIC).shape == (4, 75)

    def test_non_finite_feature(self):
        with pytest.raises(NonFiniteValue):
            FeatureVec(kind=FeatureKind.KINETIC, values=[1.0, float("inf")])


class TestStyleClassifier:

    def test_separates_synthetic_styles(self):
        motions, _ = synth_corpus(styles=3, clips_per_style=4)
        classifier = train_style_classifier(motions)
        assert classifier.classes == [0, 1, 2]
        assert style_accuracy(classifier, motions, [c.style_label for c in motions]) >= 0.9

    def test_windowed_training(self):
        motions, _ = synth_corpus(styles=2, clips_per_style=4)
        classifier = train_style_classifier(motions, window=20)
        assert classifier.window == 20
        assert classifier.predict(motions[:2]).shape == (2,)

    def test_needs_enough_clips_per_style(self):
        motions, _ = synth_corpus(styles=2, clips_per_style=3)
        with pytest.raises(TooFewClips):
            train_style_classifier(motions)

    def test_accuracy_of_nothing(self):
        motions, _ = synth_corpus(styles=2, clips_per_style=4)
        assert style_accuracy(train_style_classifier(motions), [], []) == 0.0

    def test_random_labels_score_at_chance(self):
        motions, _ = synth_corpus(styles=4, clips_per_style=4)
        classifier = train_style_classifier(motions)
        clips = [synth_dance(style=i % 4, duration_s=1.0, bpm=120.0, seed=50 + i)[0] for i in range(200)]
        labels = np.random.default_rng(0).integers(0, 4, size=200).tolist()
        assert style_accuracy(classifier, clips, labels) == pytest.approx(0.25, abs=0.1)


class TestLongTerm:

    def test_sixty_seconds_give_nineteen_anchors(self):
        windows = anchor_windows(identity_clip(1200), anchor_s=3.0, window_s=1.0)
        assert sorted(windows) == list(range(1, 20))
        assert all(w.num_frames == 20 for w in windows.values())

    def test_loop_track_tiles_features_and_beats(self):
        annotation = np.zeros(30, dtype=np.uint8)
        annotation[4] = 1
        track = MusicFeatureTrack(frames=np.arange(30 * 32).reshape(30, 32), beat_annotation=annotation)
        looped = loop_track(track, 70)
        assert looped.num_frames == 90
        np.testing.assert_array_equal(looped.frames[30:60], track.frames)
        assert np.flatnonzero(looped.beat_annotation).tolist() == [4, 34, 64]
        assert loop_track(track, 20) is track

    def test_curve_points(self):
        curve = longterm_fid_curve(long_clips(3, first_seed=0), long_clips(2, first_seed=10))
        assert [p.t for p in curve] == pytest.approx([3.0 * i for i in range(1, 20)])
        assert all(p.fid_k >= 0.0 and np.isfinite(p.fid_k) for p in curve)

    def test_degrading_motion_raises_the_curve(self):
        rng = np.random.default_rng(0)
        generated = []
        for clip in long_clips(4, first_seed=20):
            frames = np.array(clip.frames)
            seconds = np.arange(clip.num_frames)[:, None] / clip.fps
            width = clip.joint_count * 9
            frames[:, :width] += 0.02 * seconds * rng.standard_normal((clip.num_frames, width))
            generated.append(clip.with_frames(frames))
        curve = longterm_fid_curve(generated, long_clips(3, first_seed=30))
        rho, _ = spearmanr([p.t for p in curve], [p.fid_k for p in curve])
        assert rho > 0.8

    def test_short_clips_are_rejected(self):
        with pytest.raises(TooShort):
            longterm_fid_curve(long_clips(2, first_seed=0, seconds=30.0), long_clips(2, first_seed=5))


class TestEvaluateMotion:

    def test_reference_against_itself(self):
        motions, musics = synth_corpus(styles=2, clips_per_style=4)
        beats = {m.track_id: BeatTrack(flags=m.beat_annotation) for m in musics}
        report = evaluate_motion(motions, motions, music_beats=beats)
        assert report.fid_k < 1e-6
        assert report.fid_g < 1e-6
        assert report.dist_k > 0.0
        assert 0.0 < report.beat_align <= 1.0
        assert report.beat_align_shuffled is not None
        assert 0.0 <= report.style_acc <= 1.0
        assert report.curve == []
        assert (report.generated_count, report.reference_count) == (8, 8)

    def test_small_reference_skips_style_accuracy(self):
        motions, _ = synth_corpus(styles=2, clips_per_style=3)
        report = evaluate_motion(motions, motions)
        assert report.style_acc is None
        assert report.beat_align is None
