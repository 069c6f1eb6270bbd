"""
Optimisation loop: future-n supervised steps with Adam, a stepwise learning-rate
schedule, a JSON-lines loss log and periodic RDCK checkpoints.

Batches depend only on (seed, step), so prefetching them on worker threads does not
change what is trained on.
"""

import json
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path
from typing import Any, Iterator, Optional

import numpy as np
import torch
from loguru import logger
from pydantic import BaseModel, ConfigDict

from ..core.errors import IoFailure, NonFiniteGrad
from ..core.utils import derive_seed, seed_everything
from ..networks.dancer import DanceModel
from ..networks.style_encoder import triplet_loss
from ..nn.checkpoint import save_checkpoint
from ..nn.layers import set_dropout_step
from ..nn.params import ModelParams, adam_step
from ..schemas.config_schemas import RunConfig
from ..schemas.report_schemas import AblationReport, LossReport
from .batch import TrainBatch, TripletBatch, build_batch, build_triplets
from .dataset import DanceDataset
from .losses import loss_foot, loss_rec, total_loss

LOG_NAME = "train_log.jsonl"
LAST_GOOD_NAME = "last_good.rdck"
# execution-only settings, kept out of checkpoint headers
RUNTIME_FIELDS = {"train": {"workers"}}


def lr_at(step: int, base_lr: float, decay_steps: list[int]) -> float:
    """Base rate divided by 10 for every decay boundary already reached."""
    return base_lr * 0.1 ** sum(step >= boundary for boundary in decay_steps)


def moving_average(values: list[float], window: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    window = max(1, min(window, len(values)))
    kernel = np.ones(window) / window
    return np.convolve(values, kernel, mode="valid")


def checkpoint_name(step: int) -> str:
    return f"step_{step:07d}.rdck"


class TrainResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    checkpoints: list[Path]
    log_path: Path
    reports: list[LossReport]
    model: Any = None

    @property
    def final(self) -> LossReport:
        return self.reports[-1]


def _batches(
    dataset: DanceDataset, config: RunConfig, seed: int
) -> Iterator[tuple[TrainBatch, Optional[TripletBatch]]]:
    train, model = config.train, config.model

    def make(step: int):
        batch = build_batch(dataset, config, train.batch, derive_seed(seed, "batch", step))
        triplets = None
        if train.lambda_trip > 0:
            triplets = build_triplets(
                dataset, train.triplet_batch, model.w_style, derive_seed(seed, "triplet", step)
            )
        return batch, triplets

    if train.workers <= 0:
        for step in range(train.iters):
            yield make(step)
        return

    with ThreadPoolExecutor(max_workers=train.workers) as pool:
        pending: deque = deque()
        for step in range(min(train.iters, 2 * train.workers)):
            pending.append(pool.submit(make, step))
        next_step = len(pending)
        while pending:
            yield pending.popleft().result()
            if next_step < train.iters:
                pending.append(pool.submit(make, next_step))
                next_step += 1


def training_step(
    model: DanceModel,
    batch: TrainBatch,
    triplets: Optional[TripletBatch],
    config: RunConfig,
) -> tuple[torch.Tensor, dict[str, float]]:
    """Forward pass and weighted objective for one batch; returns (total, components)."""
    train = config.train
    tensors = batch.tensors()
    poses, logits = model(
        tensors["context"],
        tensors["tta"],
        tensors["music_exemplar"],
        tensors["motion_exemplar"],
        tensors["history"],
    )
    l_rec = loss_rec(poses, tensors["future"])
    l_foot = loss_foot(logits, tensors["contacts"])
    l_trip = torch.zeros(())
    if triplets is not None:
        l_trip = triplet_loss(
            model.style.music,
            torch.from_numpy(triplets.anchor),
            torch.from_numpy(triplets.positive),
            torch.from_numpy(triplets.negative),
            train.margin,
        )
    total = total_loss(l_rec, l_foot, l_trip, train.lambda_rec, train.lambda_foot, train.lambda_trip)
    components = {"l_rec": float(l_rec), "l_foot": float(l_foot), "l_trip": float(l_trip)}
    return total, components


def train(
    dataset: DanceDataset,
    config: RunConfig,
    out_dir,
    seed: Optional[int] = None,
) -> TrainResult:
    train_cfg = config.train
    seed = train_cfg.seed if seed is None else seed
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out_dir}: {exc}") from exc

    threads = seed_everything(seed)
    model = DanceModel(config.model)
    params = ModelParams(model, lr=train_cfg.lr)
    config_dump = config.model_dump(mode="json", exclude=RUNTIME_FIELDS)
    logger.info(
        "training {} parameters for {} steps (scheme={}, fusion={}, long_history={})",
        params.count(), train_cfg.iters, train_cfg.scheme, config.model.fusion, config.model.long_history,
    )

    log_path = out_dir / LOG_NAME
    checkpoints: list[Path] = []
    reports: list[LossReport] = []
    with log_path.open("w", encoding="utf-8") as log_file:
        for step, (batch, triplets) in enumerate(_batches(dataset, config, seed)):
            model.train()
            set_dropout_step(model, seed, step)
            total, components = training_step(model, batch, triplets, config)
            params.zero_grad()
            total.backward()
            lr = lr_at(step, train_cfg.lr, train_cfg.decay_steps)
            try:
                adam_step(params, lr=lr)
            except NonFiniteGrad:
                last_good = out_dir / LAST_GOOD_NAME
                save_checkpoint(model, last_good, params.step, seed, config_dump, threads)
                checkpoints.append(last_good)
                logger.error("non-finite gradient at step {}; saved {}", step, last_good)
                raise

            report = LossReport(
                step=step,
                total=float(total),
                lr=lr,
                lambda_rec=train_cfg.lambda_rec,
                lambda_foot=train_cfg.lambda_foot,
                lambda_trip=train_cfg.lambda_trip,
                **components,
            )
            reports.append(report)
            log_file.write(json.dumps(report.log_record(), sort_keys=True) + "\n")
            if step % train_cfg.log_every == 0:
                logger.info(
                    "step {} total={:.4f} rec={:.4f} foot={:.4f} trip={:.4f} lr={:.1e}",
                    step, report.total, report.l_rec, report.l_foot, report.l_trip, lr,
                )
            done = step + 1
            if done % train_cfg.checkpoint_every == 0 or done == train_cfg.iters:
                path = out_dir / checkpoint_name(done)
                save_checkpoint(model, path, params.step, seed, config_dump, threads)
                checkpoints.append(path)

    model.eval()
    return TrainResult(checkpoints=checkpoints, log_path=log_path, reports=reports, model=model)


def _merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def run_ablation(
    dataset: DanceDataset,
    base_config: RunConfig,
    variants: dict[str, dict],
    out_dir,
    smoothing: int = 50,
) -> AblationReport:
    """Train every variant (nested config overrides) and compare smoothed final losses."""
    out_dir = Path(out_dir)
    finals: dict[str, float] = {}
    for name, overrides in variants.items():
        config = RunConfig.model_validate(_merge(base_config.model_dump(mode="json"), overrides))
        result = train(dataset, config, out_dir / name)
        finals[name] = float(moving_average([r.total for r in result.reports], smoothing)[-1])
        logger.info("ablation {}: final smoothed loss {:.4f}", name, finals[name])
    differences = {f"{a}|{b}": abs(finals[a] - finals[b]) for a, b in combinations(finals, 2)}
    return AblationReport(final_losses=finals, pairwise_differences=differences)
