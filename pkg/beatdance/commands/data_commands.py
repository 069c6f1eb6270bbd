import json
from enum import Enum
from pathlib import Path
from typing import Optional

import typer
from loguru import logger

from beatdance import schemas
from beatdance.core import deps
from beatdance.core.errors import ConfigError, IoFailure
from beatdance.core.utils import derive_seed, make_rng
from beatdance.models.motion_model import DatasetManifest, ManifestEntry
from beatdance.motion import (
    load_motion,
    load_music,
    load_style_names,
    save_manifest,
    save_motion,
    save_music,
    synth_dance,
)
from beatdance.motion.synth import MAX_BPM, MIN_BPM
from beatdance.rhythm import motion_beats, music_onsets

router = typer.Typer()

MANIFEST_NAME = "manifest.json"


class BeatSource(str, Enum):
    MOTION = "motion"
    MUSIC = "music"


@router.command("synth-data")
def synth_data(
    styles: int = typer.Option(..., "--styles", help="Number of styles to synthesize"),
    clips_per_style: int = typer.Option(..., "--clips-per-style", help="Clips per style"),
    seconds: float = typer.Option(30.0, "--seconds", help="Clip duration in seconds"),
    out: Path = typer.Option(..., "--out", help="Output corpus directory"),
    seed: int = typer.Option(0, "--seed", help="Corpus seed"),
    bpm_min: float = typer.Option(90.0, "--bpm-min", help="Lowest tempo drawn per clip"),
    bpm_max: float = typer.Option(130.0, "--bpm-max", help="Highest tempo drawn per clip"),
) -> None:
    """Write a synthetic motion/music corpus and its manifest."""
    with deps.command_guard("synth-data"):
        names = load_style_names()
        if not 0 < styles <= len(names):
            raise ConfigError(f"--styles must be in 1..{len(names)}, got {styles}")
        if clips_per_style <= 0:
            raise ConfigError(f"--clips-per-style must be positive, got {clips_per_style}")
        if seconds <= 0:
            raise ConfigError(f"--seconds must be positive, got {seconds}")
        if not MIN_BPM <= bpm_min <= bpm_max <= MAX_BPM:
            raise ConfigError(f"tempo range must satisfy {MIN_BPM} <= bpm-min <= bpm-max <= {MAX_BPM}")

        out = deps.ensure_dir(out)
        deps.ensure_dir(out / "motion")
        deps.ensure_dir(out / "music")
        entries = []
        for style in range(styles):
            for index in range(clips_per_style):
                clip_seed = derive_seed(seed, "clip", style, index)
                bpm = float(make_rng(seed, "bpm", style, index).uniform(bpm_min, bpm_max))
                motion, music = synth_dance(style, seconds, bpm, clip_seed)
                clip_id = f"{names[style]}_{index:03d}"
                motion_path = Path("motion") / f"{clip_id}.rdmc"
                music_path = Path("music") / f"{clip_id}.rdmf"
                save_motion(motion, out / motion_path)
                save_music(music, out / music_path)
                entries.append(
                    ManifestEntry(
                        id=clip_id,
                        motion=motion_path.as_posix(),
                        music=music_path.as_posix(),
                        style=style,
                    )
                )

        manifest = DatasetManifest(styles=list(names[:styles]), clips=entries)
        save_manifest(manifest, out / MANIFEST_NAME)
        logger.info("wrote {} clips to {}", len(entries), out)
        deps.emit(
            schemas.CommandSummary(
                command="synth-data",
                outputs=[str(out / MANIFEST_NAME)],
                data={"clips": len(entries), "styles": styles, "seconds": seconds},
            )
        )


@router.command("beats")
def beats(
    in_path: Path = typer.Option(..., "--in", help="RDMC motion or RDMF music file"),
    kind: BeatSource = typer.Option(..., "--kind", help="Detect kinematic beats or music onsets"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the frame indices here as JSON"),
) -> None:
    """Detect beats and report them as a JSON array of frame indices."""
    with deps.command_guard("beats"):
        if kind is BeatSource.MOTION:
            track = motion_beats(load_motion(in_path))
        else:
            track = music_onsets(load_music(in_path))
        frames = track.frames()
        outputs = []
        if out is not None:
            try:
                out.write_text(json.dumps(frames), encoding="utf-8")
            except OSError as exc:
                raise IoFailure(f"cannot write {out}: {exc}") from exc
            outputs.append(str(out))
        deps.emit(
            schemas.CommandSummary(
                command="beats",
                outputs=outputs,
                data={"kind": kind.value, "count": len(frames), "frames": frames},
            )
        )
