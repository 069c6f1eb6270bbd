import hashlib
import json
from typing import Any

import numpy as np
import torch

from .config import get_settings


def derive_seed(*keys: int | str) -> int:
    """Mix integer/string keys into a 63-bit seed (stable across processes)."""
    digest = hashlib.blake2b(
        "/".join(str(k) for k in keys).encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little") & ((1 << 63) - 1)


def make_rng(*keys: int | str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(*keys))


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def seed_everything(seed: int) -> int:
    """Seed torch, pin the thread count and switch on deterministic kernels.

    Returns the thread count in effect.
    """
    settings = get_settings()
    torch.manual_seed(seed)
    torch.set_num_threads(settings.NUM_THREADS)
    if settings.DETERMINISTIC:
        torch.use_deterministic_algorithms(True)
    return settings.NUM_THREADS
