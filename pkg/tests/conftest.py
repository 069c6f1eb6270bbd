import os

os.environ.setdefault("BEATDANCE_LOG_LEVEL", "ERROR")

import pytest
from typer.testing import CliRunner

from beatdance import schemas
from beatdance.core.logging import configure_logging
from beatdance.models import DatasetManifest, ManifestEntry
from beatdance.motion import save_manifest, save_motion, save_music
from beatdance.training import DanceDataset

from .helpers import style_names, synth_corpus

configure_logging()


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run toy-scale end-to-end tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tiny_model_config():
    return schemas.ModelConfig(
        layers=2,
        heads=2,
        d_model=16,
        ffn=32,
        n=3,
        m=4,
        w_ctx=8,
        w_style=8,
        mag_layer=0,
        tta_cap=10,
        style_layers=1,
        dropout=0.0,
    )


@pytest.fixture
def tiny_run_config(tiny_model_config):
    return schemas.RunConfig(
        model=tiny_model_config,
        train=schemas.TrainConfig(
            lr=1e-3,
            decay_steps=[100, 200],
            batch=4,
            iters=3,
            history_len=24,
            triplet_batch=4,
            checkpoint_every=2,
            log_every=1,
        ),
    )


@pytest.fixture
def tiny_dataset():
    motions, musics = synth_corpus()
    return DanceDataset(motions, musics, style_names(2))


@pytest.fixture
def corpus_dir(tmp_path):
    """A two-style synthetic corpus on disk with its manifest."""
    root = tmp_path / "corpus"
    (root / "motion").mkdir(parents=True)
    (root / "music").mkdir()
    motions, musics = synth_corpus()
    entries = []
    for motion, music in zip(motions, musics):
        save_motion(motion, root / "motion" / f"{motion.clip_id}.rdmc")
        save_music(music, root / "music" / f"{music.track_id}.rdmf")
        entries.append(
            ManifestEntry(
                id=motion.clip_id,
                motion=f"motion/{motion.clip_id}.rdmc",
                music=f"music/{music.track_id}.rdmf",
                style=motion.style_label,
            )
        )
    save_manifest(DatasetManifest(styles=style_names(2), clips=entries), root / "manifest.json")
    return root


@pytest.fixture
def runner():
    return CliRunner()
