from pathlib import Path
from typing import Optional

import typer

from beatdance import schemas
from beatdance.core import deps
from beatdance.training import DanceDataset, train as run_training

router = typer.Typer()


@router.command("train")
def train(
    config: Path = typer.Option(..., "--config", help="JSON run configuration"),
    out: Path = typer.Option(..., "--out", help="Directory for checkpoints and the loss log"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Overrides train.seed"),
) -> None:
    """Train a dance model on the manifest named by the run configuration."""
    with deps.command_guard("train"):
        run_config = deps.load_run_config(config)
        manifest = deps.resolve_manifest(run_config, config)
        dataset = DanceDataset.from_manifest(
            manifest,
            mirror=run_config.train.mirror,
            contact_threshold=run_config.train.contact_threshold,
        )
        result = run_training(dataset, run_config, deps.ensure_dir(out), seed=seed)

        data = {"steps": len(result.reports)}
        if result.reports:
            data.update(result.final.log_record())
        deps.emit(
            schemas.CommandSummary(
                command="train",
                outputs=[str(path) for path in [*result.checkpoints, result.log_path]],
                data=data,
            )
        )
