"""
Shared command dependencies: run-config and checkpoint loading, and the guard that
turns library errors into a JSON error line and an exit code.
"""

import json
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

import typer
from loguru import logger
from pydantic import ValidationError

from ..networks.dancer import DanceModel
from ..nn.checkpoint import assign_parameters, read_checkpoint
from ..schemas.common_schemas import CommandSummary, ErrorResponse
from ..schemas.config_schemas import RunConfig
from .errors import BeatDanceError, ConfigError, IoFailure


def load_run_config(path) -> RunConfig:
    """Parse and validate a JSON run configuration; unknown keys are rejected."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"invalid config {path}: {problems}") from exc


def resolve_manifest(config: RunConfig, config_path) -> Path:
    manifest = Path(config.data.manifest)
    if not manifest.is_absolute():
        manifest = Path(config_path).parent / manifest
    return manifest


def load_dance_model(checkpoint) -> tuple[DanceModel, RunConfig, dict]:
    """Rebuild the model described by a checkpoint header and load its parameters."""
    header, tensors = read_checkpoint(checkpoint)
    try:
        config = RunConfig.model_validate(header["config"])
    except (KeyError, ValidationError) as exc:
        raise IoFailure(f"{checkpoint}: checkpoint carries no usable run config") from exc
    model = DanceModel(config.model)
    assign_parameters(model, tensors, checkpoint)
    model.eval()
    return model, config, header


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create directory {path}: {exc}") from exc
    return path


def emit(summary: CommandSummary) -> None:
    typer.echo(summary.model_dump_json(exclude_none=True))


@contextmanager
def command_guard(command: str) -> Iterator[None]:
    """Map BeatDanceError to {error, detail} on stderr and the family's exit code."""
    try:
        yield
    except BeatDanceError as exc:
        logger.debug("{} failed: {}", command, exc.detail)
        payload = ErrorResponse(**exc.to_payload())
        typer.echo(payload.model_dump_json(), err=True)
        raise typer.Exit(code=exc.exit_code)

