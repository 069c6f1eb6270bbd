from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from loguru import logger

from beatdance import schemas
from beatdance.core import deps
from beatdance.core.errors import IoFailure
from beatdance.evaluation import evaluate_motion
from beatdance.models import MotionClip
from beatdance.motion import load_motion

from .generate_commands import beats_sidecar, read_beats_sidecar

router = typer.Typer()


def load_clip_dir(directory: Path, workers: int = 1) -> tuple[list[Path], list[MotionClip]]:
    """Every ``*.rdmc`` in ``directory``, in file-name order."""
    if not directory.is_dir():
        raise IoFailure(f"{directory} is not a directory")
    paths = sorted(directory.glob("*.rdmc"))
    if not paths:
        raise IoFailure(f"no .rdmc files in {directory}")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        clips = list(pool.map(load_motion, paths))
    return paths, clips


def export_curve(report: schemas.EvaluationReport, path: Path) -> None:
    rows = np.array([[point.t, point.fid_k] for point in report.curve], dtype=np.float64).reshape(-1, 2)
    try:
        np.savetxt(path, rows, delimiter=",", header="t,fid_k", comments="", fmt="%.6f")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


@router.command("evaluate")
def evaluate(
    generated: Path = typer.Option(..., "--generated", help="Directory of generated RDMC clips"),
    reference: Path = typer.Option(..., "--reference", help="Directory of reference RDMC clips"),
    out: Path = typer.Option(..., "--out", help="Output JSON report"),
    export_csv: Optional[Path] = typer.Option(None, "--export-csv", help="Write the long-term curve as CSV"),
    workers: int = typer.Option(4, "--workers", help="Threads used to load clips"),
) -> None:
    """Score generated clips against a reference set."""
    with deps.command_guard("evaluate"):
        generated_paths, generated_clips = load_clip_dir(generated, workers)
        _, reference_clips = load_clip_dir(reference, workers)

        music_beats = {}
        for path, clip in zip(generated_paths, generated_clips):
            sidecar = beats_sidecar(path)
            if sidecar.is_file():
                music_beats[clip.clip_id] = read_beats_sidecar(sidecar)
        logger.info(
            "evaluating {} generated clips ({} with beats) against {} references",
            len(generated_clips), len(music_beats), len(reference_clips),
        )

        report = evaluate_motion(generated_clips, reference_clips, music_beats=music_beats or None)
        try:
            out.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write {out}: {exc}") from exc
        outputs = [str(out)]
        if export_csv is not None:
            export_curve(report, export_csv)
            outputs.append(str(export_csv))

        deps.emit(
            schemas.CommandSummary(
                command="evaluate",
                outputs=outputs,
                data=report.model_dump(exclude={"curve"}),
            )
        )
