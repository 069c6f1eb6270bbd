"""
Central finite-difference gradient checker. The target is deep-copied to float64
and put in eval mode, so the caller's module is left untouched.
"""

import copy
from typing import Callable, Mapping, Optional, Union

import numpy as np
import torch
from torch import nn

from ..core.errors import NonFiniteValue
from ..core.utils import make_rng
from .params import ModelParams

Target = Union[nn.Module, ModelParams, Mapping[str, torch.Tensor]]

KINK_TOLERANCE = 1e-2
# reported for coordinates where one-sided differences disagree (non-smooth point)
KINK_ERROR = 1.0
# multiples of eps * |f| / h, the resolution of a central difference
ROUNDOFF_FACTOR = 100.0


def _as_float64(target: Target):
    if isinstance(target, ModelParams):
        target = target.module
    if isinstance(target, nn.Module):
        clone = copy.deepcopy(target).double().eval()
        return clone, dict(clone.named_parameters())
    tensors = {
        name: t.detach().to(torch.float64).clone().requires_grad_(True) for name, t in target.items()
    }
    return tensors, tensors


def _scalar(f: Callable, arg) -> torch.Tensor:
    value = f(arg)
    if value.numel() != 1:
        raise NonFiniteValue(f"gradient check needs a scalar objective, got shape {tuple(value.shape)}")
    if not torch.isfinite(value).all():
        raise NonFiniteValue("objective is not finite")
    return value.reshape(())


def grad_check(
    f: Callable,
    target: Target,
    h: float = 1e-5,
    coords_per_tensor: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Max relative error |a - n| / max(1e-8, |a| + |n|) over checked coordinates.

    ``f`` receives the float64 copy (module or name -> tensor dict) and returns a
    scalar. Coordinates whose derivatives both sit below the finite-difference
    resolution count as exact. With ``coords_per_tensor`` only that many random
    coordinates of each tensor are perturbed.
    """
    arg, tensors = _as_float64(target)
    base = _scalar(f, arg)
    names = list(tensors)
    analytic = torch.autograd.grad(base, [tensors[n] for n in names], allow_unused=True)
    f0 = float(base)
    resolution = ROUNDOFF_FACTOR * np.finfo(np.float64).eps * max(1.0, abs(f0)) / h
    rng = make_rng("grad-check", seed)

    worst = 0.0
    for name, grad in zip(names, analytic):
        tensor = tensors[name]
        grad = torch.zeros_like(tensor) if grad is None else grad
        flat, grad_flat = tensor.data.view(-1), grad.reshape(-1)
        coords = np.arange(flat.numel())
        if coords_per_tensor is not None and coords_per_tensor < flat.numel():
            coords = rng.choice(flat.numel(), size=coords_per_tensor, replace=False)
        for index in coords:
            original = float(flat[index])
            with torch.no_grad():
                flat[index] = original + h
                f_plus = float(_scalar(f, arg))
                flat[index] = original - h
                f_minus = float(_scalar(f, arg))
                flat[index] = original
            numeric = (f_plus - f_minus) / (2.0 * h)
            exact = float(grad_flat[index])
            forward, backward = (f_plus - f0) / h, (f0 - f_minus) / h
            if abs(forward - backward) > KINK_TOLERANCE * (1.0 + abs(forward) + abs(backward)):
                error = KINK_ERROR
            elif abs(exact) + abs(numeric) <= resolution:
                error = 0.0
            else:
                error = abs(exact - numeric) / max(1e-8, abs(exact) + abs(numeric))
            worst = max(worst, error)
    return worst
