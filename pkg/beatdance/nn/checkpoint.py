"""
RDCK checkpoint files.

Layout: b"RDCK", u32 version, u32 header byte length, UTF-8 JSON header with sorted
keys ({params: [{name, shape}], step, seed, config_hash, config, threads}), then every
parameter as little-endian float32 in header order. Nothing time-dependent is
written, so identical runs produce identical bytes.
"""

import json
import struct
from pathlib import Path
from typing import Any, Optional

import numpy as np
import torch
from torch import nn

from ..core.errors import BadMagic, DimensionMismatch, IoFailure, TruncatedFile
from ..core.utils import config_hash

CHECKPOINT_MAGIC = b"RDCK"
CHECKPOINT_VERSION = 1
_PREAMBLE = struct.Struct("<II")


def save_checkpoint(
    module: nn.Module,
    path,
    step: int,
    seed: int,
    config: dict[str, Any],
    threads: int = 1,
) -> None:
    named = list(module.named_parameters())
    header = {
        "params": [{"name": name, "shape": list(p.shape)} for name, p in named],
        "step": step,
        "seed": seed,
        "config_hash": config_hash(config),
        "config": config,
        "threads": threads,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    body = b"".join(p.detach().cpu().numpy().astype("<f4").tobytes() for _, p in named)
    payload = CHECKPOINT_MAGIC + _PREAMBLE.pack(CHECKPOINT_VERSION, len(header_bytes)) + header_bytes + body
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write checkpoint {path}: {exc}") from exc


def read_checkpoint(path) -> tuple[dict[str, Any], dict[str, np.ndarray]]:
    """Return (header, name -> float32 array)."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read checkpoint {path}: {exc}") from exc
    if raw[:4] != CHECKPOINT_MAGIC:
        raise BadMagic(f"{path}: not an RDCK checkpoint")
    if len(raw) < 4 + _PREAMBLE.size:
        raise TruncatedFile(f"{path}: checkpoint preamble truncated")
    version, header_len = _PREAMBLE.unpack_from(raw, 4)
    if version != CHECKPOINT_VERSION:
        raise BadMagic(f"{path}: unsupported checkpoint version {version}")
    start = 4 + _PREAMBLE.size
    if len(raw) < start + header_len:
        raise TruncatedFile(f"{path}: checkpoint header truncated")
    try:
        header = json.loads(raw[start: start + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadMagic(f"{path}: unreadable checkpoint header ({exc})") from exc

    offset = start + header_len
    tensors = {}
    for entry in header["params"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        chunk = raw[offset: offset + 4 * count]
        if len(chunk) < 4 * count:
            raise TruncatedFile(f"{path}: parameter {entry['name']} truncated")
        tensors[entry["name"]] = np.frombuffer(chunk, dtype="<f4").reshape(entry["shape"]).copy()
        offset += 4 * count
    if offset != len(raw):
        raise DimensionMismatch(f"{path}: {len(raw) - offset} trailing bytes")
    return header, tensors


def load_checkpoint(module: nn.Module, path, expected_hash: Optional[str] = None) -> dict[str, Any]:
    """Copy checkpoint values into ``module``; returns the header."""
    header, tensors = read_checkpoint(path)
    if expected_hash is not None and header["config_hash"] != expected_hash:
        raise DimensionMismatch(f"{path}: checkpoint was written for a different config")
    assign_parameters(module, tensors, path)
    return header


def assign_parameters(module: nn.Module, tensors: dict[str, np.ndarray], path="checkpoint") -> None:
    named = dict(module.named_parameters())
    if set(named) != set(tensors):
        missing = sorted(set(named) ^ set(tensors))[:5]
        raise DimensionMismatch(f"{path}: parameter names differ from the model ({missing} ...)")
    with torch.no_grad():
        for name, value in tensors.items():
            if tuple(named[name].shape) != value.shape:
                raise DimensionMismatch(
                    f"{path}: {name} has shape {value.shape}, model expects {tuple(named[name].shape)}"
                )
            named[name].copy_(torch.from_numpy(value))
