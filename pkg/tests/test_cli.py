import json
import struct

import pytest

from beatdance.main import app
from beatdance.motion import load_manifest, load_motion
from beatdance.training import train

from .helpers import last_json

TINY_RUN = {
    "model": {
        "layers": 2, "heads": 2, "d_model": 16, "ffn": 32, "n": 3, "m": 4,
        "w_ctx": 8, "w_style": 8, "mag_layer": 0, "tta_cap": 10, "style_layers": 1, "dropout": 0.0,
    },
    "train": {
        "lr": 1e-3, "decay_steps": [100, 200], "batch": 4, "iters": 3, "history_len": 24,
        "triplet_batch": 4, "checkpoint_every": 2, "log_every": 1,
    },
    "data": {"manifest": "corpus/manifest.json"},
}


@pytest.fixture
def checkpoint(tiny_dataset, tiny_run_config, tmp_path):
    return train(tiny_dataset, tiny_run_config, tmp_path / "run").checkpoints[-1]


def synth(runner, out, seed=0, styles="2"):
    return runner.invoke(app, [
        "synth-data", "--styles", styles, "--clips-per-style", "2", "--seconds", "3",
        "--out", str(out), "--seed", str(seed),
    ])


def generate(runner, checkpoint, corpus_dir, out, *extra):
    return runner.invoke(app, [
        "generate", "--checkpoint", str(checkpoint),
        "--music", str(corpus_dir / "music" / "s0_0.rdmf"),
        "--out", str(out), *extra,
    ])


class TestCli:

    def test_help_lists_commands(self, runner):
        result = runner.invoke(app, ["--help"])
        assert result.exit_code == 0
        for name in ("synth-data", "beats", "train", "generate", "evaluate"):
            assert name in result.output


class TestSynthData:

    def test_writes_corpus_and_manifest(self, runner, tmp_path):
        result = synth(runner, tmp_path / "corpus")
        assert result.exit_code == 0, result.output
        summary = last_json(result.output)
        assert summary["status"] == "success"
        assert summary["data"]["clips"] == 4
        manifest = load_manifest(tmp_path / "corpus" / "manifest.json")
        assert len(manifest.clips) == 4
        assert sorted({entry.style for entry in manifest.clips}) == [0, 1]
        assert load_motion(manifest.resolve(manifest.clips[0].motion)).num_frames == 60

    def test_same_seed_same_bytes(self, runner, tmp_path):
        synth(runner, tmp_path / "a", seed=3)
        synth(runner, tmp_path / "b", seed=3)
        files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.rdm?"))
        assert len(files) == 8
        for name in files:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_changes_corpus(self, runner, tmp_path):
        synth(runner, tmp_path / "a", seed=1)
        synth(runner, tmp_path / "b", seed=2)
        first = sorted((tmp_path / "a" / "motion").iterdir())[0].name
        assert (tmp_path / "a" / "motion" / first).read_bytes() != (tmp_path / "b" / "motion" / first).read_bytes()

    def test_zero_styles_is_a_usage_error(self, runner, tmp_path):
        result = synth(runner, tmp_path / "corpus", styles="0")
        assert result.exit_code == 2
        payload = last_json(result.output)
        assert payload["error"] == "ConfigError"
        assert "--styles" in payload["detail"]

    def test_tempo_range_is_checked(self, runner, tmp_path):
        result = runner.invoke(app, [
            "synth-data", "--styles", "1", "--clips-per-style", "1", "--out", str(tmp_path),
            "--bpm-min", "140", "--bpm-max", "100",
        ])
        assert result.exit_code == 2


class TestBeats:

    def test_motion_beats_to_file(self, runner, corpus_dir, tmp_path):
        out = tmp_path / "beats.json"
        result = runner.invoke(app, [
            "beats", "--in", str(corpus_dir / "motion" / "s0_0.rdmc"), "--kind", "motion", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        summary = last_json(result.output)
        assert json.loads(out.read_text()) == summary["data"]["frames"]
        assert summary["data"]["count"] > 0

    def test_music_onsets(self, runner, corpus_dir):
        result = runner.invoke(app, ["beats", "--in", str(corpus_dir / "music" / "s1_0.rdmf"), "--kind", "music"])
        assert result.exit_code == 0, result.output
        assert last_json(result.output)["data"]["kind"] == "music"

    def test_zero_fps_header_is_a_data_error(self, runner, tmp_path):
        path = tmp_path / "zero.rdmc"
        path.write_bytes(b"RDMC" + struct.pack("<5I", 1, 24, 1, 0, 0) + bytes(4 * 219))
        result = runner.invoke(app, ["beats", "--in", str(path), "--kind", "motion"])
        assert result.exit_code == 3
        assert last_json(result.output)["error"] == "DimensionMismatch"

    def test_missing_input_is_a_data_error(self, runner, tmp_path):
        result = runner.invoke(app, ["beats", "--in", str(tmp_path / "absent.rdmc"), "--kind", "motion"])
        assert result.exit_code == 3
        assert last_json(result.output)["error"] == "IoFailure"


class TestTrain:

    def test_trains_from_config(self, runner, corpus_dir, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps(TINY_RUN))
        result = runner.invoke(app, ["train", "--config", str(config), "--out", str(tmp_path / "ckpt")])
        assert result.exit_code == 0, result.output
        summary = last_json(result.output)
        assert summary["data"]["steps"] == 3
        assert (tmp_path / "ckpt" / "step_0000003.rdck").is_file()
        assert (tmp_path / "ckpt" / "train_log.jsonl").is_file()

    def test_unknown_config_key(self, runner, corpus_dir, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({**TINY_RUN, "extra": 1}))
        result = runner.invoke(app, ["train", "--config", str(config), "--out", str(tmp_path / "ckpt")])
        assert result.exit_code == 2
        assert last_json(result.output)["error"] == "ConfigError"

    def test_missing_config(self, runner, tmp_path):
        result = runner.invoke(app, ["train", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)])
        assert result.exit_code == 2


class TestGenerate:

    def test_writes_clip_and_beat_sidecar(self, runner, checkpoint, corpus_dir, tmp_path):
        out = tmp_path / "gen" / "dance.rdmc"
        result = generate(
            runner, checkpoint, corpus_dir, out,
            "--seed-motion", str(corpus_dir / "motion" / "s0_1.rdmc"), "--seconds", "2", "--stride", "3",
        )
        assert result.exit_code == 0, result.output
        assert last_json(result.output)["data"]["frames"] == 40
        assert load_motion(out).num_frames == 40
        sidecar = json.loads((tmp_path / "gen" / "dance.beats.json").read_text())
        assert sidecar["length"] == 40
        assert sidecar["fps"] == 20

    def test_same_inputs_same_bytes(self, runner, checkpoint, corpus_dir, tmp_path):
        extra = ("--seed-motion", str(corpus_dir / "motion" / "s0_1.rdmc"), "--seconds", "5")
        generate(runner, checkpoint, corpus_dir, tmp_path / "a.rdmc", *extra)
        generate(runner, checkpoint, corpus_dir, tmp_path / "b.rdmc", *extra)
        assert load_motion(tmp_path / "a.rdmc").num_frames == 100
        assert (tmp_path / "a.rdmc").read_bytes() == (tmp_path / "b.rdmc").read_bytes()

    def test_style_matched_seed_from_manifest(self, runner, checkpoint, corpus_dir, tmp_path):
        result = generate(
            runner, checkpoint, corpus_dir, tmp_path / "dance.rdmc",
            "--manifest", str(corpus_dir / "manifest.json"), "--seconds", "1",
        )
        assert result.exit_code == 0, result.output
        assert last_json(result.output)["data"]["seed_clip"] == "s0_0"

    def test_seed_motion_is_required(self, runner, checkpoint, corpus_dir, tmp_path):
        result = generate(runner, checkpoint, corpus_dir, tmp_path / "dance.rdmc", "--seconds", "1")
        assert result.exit_code == 2

    def test_bad_checkpoint(self, runner, corpus_dir, tmp_path):
        bogus = tmp_path / "bogus.rdck"
        bogus.write_bytes(b"JUNK" + bytes(16))
        result = generate(
            runner, bogus, corpus_dir, tmp_path / "dance.rdmc",
            "--seed-motion", str(corpus_dir / "motion" / "s0_1.rdmc"), "--seconds", "1",
        )
        assert result.exit_code == 3
        assert last_json(result.output)["error"] == "BadMagic"


class TestEvaluate:

    def test_reference_against_itself(self, runner, corpus_dir, tmp_path):
        out, csv = tmp_path / "report.json", tmp_path / "curve.csv"
        motion_dir = str(corpus_dir / "motion")
        result = runner.invoke(app, [
            "evaluate", "--generated", motion_dir, "--reference", motion_dir,
            "--out", str(out), "--export-csv", str(csv), "--workers", "2",
        ])
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert report["fid_k"] < 1e-6
        assert report["generated_count"] == 6
        assert report["beat_align"] is None
        assert csv.read_text().splitlines() == ["t,fid_k"]
        assert last_json(result.output)["data"]["fid_k"] == pytest.approx(report["fid_k"])

    def test_generated_clips_with_sidecars(self, runner, checkpoint, corpus_dir, tmp_path):
        gen = tmp_path / "gen"
        for name in ("s0_1", "s0_2"):
            generate(
                runner, checkpoint, corpus_dir, gen / f"{name}.rdmc",
                "--seed-motion", str(corpus_dir / "motion" / f"{name}.rdmc"), "--seconds", "3",
            )
        result = runner.invoke(app, [
            "evaluate", "--generated", str(gen), "--reference", str(corpus_dir / "motion"),
            "--out", str(tmp_path / "report.json"),
        ])
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["generated_count"] == 2
        assert "beat_align" in report

    def test_missing_directory(self, runner, tmp_path):
        result = runner.invoke(app, [
            "evaluate", "--generated", str(tmp_path / "nope"), "--reference", str(tmp_path),
            "--out", str(tmp_path / "r.json"),
        ])
        assert result.exit_code == 3
