import numpy as np
import pytest

from beatdance.core.errors import TooShort
from beatdance.models import BeatTrack, MusicFeatureTrack
from beatdance.motion import synth_dance
from beatdance.rhythm import motion_beats, music_novelty, music_onsets, speed_beats, tta_encode
from beatdance.rhythm.tta import default_cap

from .helpers import identity_clip


def recall(detected: list[int], annotated: np.ndarray, tolerance: int = 1) -> float:
    detected = np.asarray(detected)
    if not len(detected):
        return 0.0
    hits = [np.abs(detected - frame).min() <= tolerance for frame in annotated]
    return float(np.mean(hits))


def brute_force_tta(flags: np.ndarray, cap: int) -> list[int]:
    values = []
    for t in range(len(flags)):
        ahead = [u - t for u in range(t, len(flags)) if flags[u]]
        values.append(min(cap, ahead[0]) if ahead else cap)
    return values


class TestMotionBeats:

    @pytest.mark.parametrize("style", [0, 1, 2])
    def test_recovers_synthetic_beats(self, style):
        motion, music = synth_dance(style=style, duration_s=10.0, bpm=120.0, seed=4)
        detected = motion_beats(motion).frames()
        assert recall(detected, np.flatnonzero(music.beat_annotation)) >= 0.9

    def test_constant_velocity_has_no_beats(self):
        clip = identity_clip(30)
        frames = np.array(clip.frames)
        frames[:, -3] = 0.5 * np.arange(30, dtype=np.float32)
        assert motion_beats(clip.with_frames(frames)).frames() == []

    def test_single_dip(self):
        assert speed_beats(np.array([1.0, 0.1, 1.0]), neighborhood=1, min_separation=1, prominence=0.0) == [1]

    def test_min_separation_is_respected(self):
        speed = np.random.default_rng(0).random(400)
        beats = speed_beats(speed, neighborhood=5, min_separation=4, prominence=0.0)
        assert len(beats) > 10
        assert np.diff(beats).min() >= 4

    def test_earlier_beat_wins(self):
        speed = np.array([1.0, 0.2, 1.0, 0.1, 1.0, 1.0])
        assert speed_beats(speed, neighborhood=2, min_separation=3, prominence=0.0) == [1]

    def test_uniform_scaling_keeps_beats(self):
        speed = np.random.default_rng(1).random(200)
        base = speed_beats(speed, neighborhood=10, min_separation=4, prominence=0.5)
        assert speed_beats(3.7 * speed, neighborhood=10, min_separation=4, prominence=0.5) == base

    def test_needs_three_frames(self):
        with pytest.raises(TooShort):
            motion_beats(identity_clip(2))


class TestMusicOnsets:

    @pytest.mark.parametrize("bpm", [90.0, 120.0])
    def test_recovers_synthetic_beats(self, bpm):
        _, music = synth_dance(style=1, duration_s=10.0, bpm=bpm, seed=2)
        detected = music_onsets(music, k=1.0).frames()
        annotated = np.flatnonzero(music.beat_annotation)
        # frame 0 has no predecessor to rise from
        assert recall(detected, annotated[annotated > 0]) >= 0.9

    def test_decrease_after_the_first_frame_is_not_an_onset(self):
        features = np.zeros((10, 32))
        features[0, :4] = 1.0
        assert music_onsets(MusicFeatureTrack(frames=features), k=1.0).frames() == []

    def test_first_frame_has_zero_novelty(self):
        features = np.random.default_rng(0).normal(size=(12, 32))
        novelty = music_novelty(MusicFeatureTrack(frames=features))
        assert novelty[0] == 0.0
        assert (novelty[1:] >= 0.0).all()

    def test_constant_features_have_no_onsets(self):
        track = MusicFeatureTrack(frames=np.full((40, 32), 0.3))
        assert music_onsets(track).frames() == []

    def test_single_step(self):
        features = np.zeros((10, 32))
        features[5:, :4] = 1.0
        assert music_onsets(MusicFeatureTrack(frames=features), k=1.0).frames() == [5]

    def test_needs_two_frames(self):
        with pytest.raises(TooShort):
            music_onsets(MusicFeatureTrack(frames=np.zeros((1, 32))))


class TestTimeToArrival:

    def test_forward_scan_example(self):
        tta = tta_encode(BeatTrack(flags=[1, 0, 0, 1, 0]), cap=8)
        assert tta.values.tolist() == [0, 2, 1, 0, 8]

    def test_all_beats(self):
        assert tta_encode(BeatTrack(flags=np.ones(6)), cap=8).values.tolist() == [0] * 6

    def test_no_beats_reads_cap(self):
        assert tta_encode(BeatTrack(flags=np.zeros(6)), cap=8).values.tolist() == [8] * 6

    def test_default_cap_is_two_seconds(self):
        assert default_cap(20) == 40
        assert tta_encode(BeatTrack(flags=np.zeros(3))).cap == 40

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            length = int(rng.integers(1, 60))
            flags = (rng.random(length) < rng.uniform(0.0, 0.4)).astype(np.uint8)
            cap = int(rng.integers(1, 20))
            assert tta_encode(BeatTrack(flags=flags), cap=cap).values.tolist() == brute_force_tta(flags, cap)


class TestBeatTrack:

    def test_window_pads_outside_the_track(self):
        track = BeatTrack.from_frames([0, 2], length=4)
        assert track.window(-2, 6).flags.tolist() == [0, 0, 1, 0, 1, 0, 0, 0]

    def test_times_use_fps(self):
        np.testing.assert_allclose(BeatTrack.from_frames([10, 30], length=40, fps=20).times(), [0.5, 1.5])
