import json
from pathlib import Path
from typing import Optional

import torch
import typer
from loguru import logger

from beatdance import schemas
from beatdance.core import deps
from beatdance.core.errors import (
    ConfigError,
    DimensionMismatch,
    IoFailure,
    NoEligibleClip,
    NonFiniteActivation,
    TooShort,
)
from beatdance.core.utils import seed_everything
from beatdance.evaluation import loop_track
from beatdance.models import BeatTrack, MotionClip
from beatdance.motion import (
    load_manifest,
    load_motion,
    load_music,
    orthonormalize_rotations,
    save_motion,
)
from beatdance.networks import rollout, style_embedding
from beatdance.rhythm import music_onsets

router = typer.Typer()

BEATS_SUFFIX = ".beats.json"


def beats_sidecar(motion_path: Path) -> Path:
    """``dance.rdmc`` -> ``dance.beats.json``."""
    return motion_path.with_name(motion_path.stem + BEATS_SUFFIX)


def write_beats_sidecar(path: Path, beats: BeatTrack) -> None:
    payload = {"fps": beats.fps, "length": len(beats), "frames": beats.frames()}
    try:
        path.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_beats_sidecar(path: Path) -> BeatTrack:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        return BeatTrack.from_frames(payload["frames"], payload["length"], payload["fps"])
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, IndexError) as exc:
        raise IoFailure(f"{path}: malformed beat sidecar") from exc


def style_matched_seed(manifest_path: Path, style: int, min_frames: int) -> MotionClip:
    """First manifest clip (by id) of ``style`` long enough to seed a rollout."""
    manifest = load_manifest(manifest_path)
    for entry in sorted(manifest.clips, key=lambda e: e.id):
        if entry.style != style:
            continue
        clip = load_motion(manifest.resolve(entry.motion))
        if clip.num_frames >= min_frames:
            return clip.model_copy(update={"clip_id": entry.id, "style_label": entry.style})
    raise NoEligibleClip(f"no clip of style {style} with at least {min_frames} frames in {manifest_path}")


@router.command("generate")
def generate(
    checkpoint: Path = typer.Option(..., "--checkpoint", help="RDCK checkpoint"),
    music: Path = typer.Option(..., "--music", help="RDMF music feature file"),
    seed_motion: Optional[Path] = typer.Option(None, "--seed-motion", help="RDMC seed and motion exemplar"),
    manifest: Optional[Path] = typer.Option(
        None, "--manifest", help="Pick a style-matched seed motion from this manifest"
    ),
    seconds: float = typer.Option(..., "--seconds", help="Length of the generated clip in seconds"),
    stride: int = typer.Option(1, "--stride", help="Frames appended per generation step"),
    out: Path = typer.Option(..., "--out", help="Output RDMC file"),
    orthonormalize: bool = typer.Option(
        False, "--orthonormalize", help="Project rotation blocks to the closest rotation on export"
    ),
) -> None:
    """Dance to a music file: onsets drive the beats, the first window of music and seed give the style."""
    with deps.command_guard("generate"):
        model, run_config, header = deps.load_dance_model(checkpoint)
        config = run_config.model
        seed_everything(int(header.get("seed", 0)))

        track = load_music(music)
        if track.fps != config.fps:
            raise DimensionMismatch(f"music runs at {track.fps} fps, the model at {config.fps}")
        exemplar_frames = max(config.w_ctx, config.w_style)
        if seed_motion is not None:
            seed_clip = load_motion(seed_motion)
        elif manifest is not None:
            seed_clip = style_matched_seed(manifest, track.style_label, exemplar_frames)
        else:
            raise ConfigError("pass --seed-motion or --manifest to choose the seed motion")
        if seed_clip.fps != config.fps or seed_clip.joint_count != config.joint_count:
            raise DimensionMismatch("seed motion does not match the model's fps or skeleton")
        if seed_clip.num_frames < exemplar_frames:
            raise TooShort(f"seed motion needs at least {exemplar_frames} frames")

        total_frames = int(round(seconds * config.fps))
        looped = loop_track(track, max(total_frames, config.w_style))
        beats = music_onsets(looped).window(0, total_frames)
        with torch.no_grad():
            style = style_embedding(
                model.style, looped.slice(0, config.w_style), seed_clip.slice(0, config.w_style)
            )
        result = rollout(
            model,
            seed_clip.slice(0, config.w_ctx),
            beats,
            style,
            total_frames,
            stride=stride,
        )

        clip = orthonormalize_rotations(result.clip) if orthonormalize else result.clip
        deps.ensure_dir(out.parent)
        save_motion(clip, out)
        sidecar = beats_sidecar(out)
        write_beats_sidecar(sidecar, beats.window(0, clip.num_frames))
        if not result.completed:
            raise NonFiniteActivation(
                f"rollout stopped after {clip.num_frames} of {total_frames} frames; partial clip written to {out}"
            )
        logger.info("generated {} frames in {} steps", clip.num_frames, result.steps)
        deps.emit(
            schemas.CommandSummary(
                command="generate",
                outputs=[str(out), str(sidecar)],
                data={
                    "frames": clip.num_frames,
                    "seconds": clip.duration_s,
                    "steps": result.steps,
                    "seed_clip": seed_clip.clip_id,
                },
            )
        )
