from typing import Mapping, Optional

import torch
from torch import nn

from ..core.errors import NonFiniteGrad


class ModelParams:
    """Named learnable tensors of a module together with Adam state and a step counter."""

    def __init__(
        self,
        module: nn.Module,
        lr: float = 1e-4,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        self.module = module
        self.optimizer = torch.optim.Adam(module.parameters(), lr=lr, betas=betas, eps=eps)
        self.step = 0

    @property
    def tensors(self) -> dict[str, torch.Tensor]:
        return dict(self.module.named_parameters())

    def grads(self) -> dict[str, Optional[torch.Tensor]]:
        return {name: p.grad for name, p in self.module.named_parameters()}

    def moments(self) -> dict[str, tuple[torch.Tensor, torch.Tensor]]:
        """First and second Adam moments per parameter (absent before the first step)."""
        out = {}
        for name, p in self.module.named_parameters():
            state = self.optimizer.state.get(p)
            if state:
                out[name] = (state["exp_avg"], state["exp_avg_sq"])
        return out

    def zero_grad(self) -> None:
        self.optimizer.zero_grad(set_to_none=True)

    def count(self) -> int:
        return sum(p.numel() for p in self.module.parameters())


def adam_step(
    params: ModelParams,
    grads: Optional[Mapping[str, torch.Tensor]] = None,
    lr: Optional[float] = None,
    beta1: Optional[float] = None,
    beta2: Optional[float] = None,
    eps: Optional[float] = None,
) -> None:
    """One bias-corrected Adam update. ``grads`` overrides the accumulated .grad fields.

    Raises NonFiniteGrad before touching any parameter.
    """
    named = params.tensors
    if grads is not None:
        for name, grad in grads.items():
            named[name].grad = grad.detach().to(named[name].dtype).clone()
    for name, p in named.items():
        if p.grad is not None and not torch.isfinite(p.grad).all():
            raise NonFiniteGrad(f"non-finite gradient in {name} at step {params.step}")

    for group in params.optimizer.param_groups:
        if lr is not None:
            group["lr"] = lr
        if beta1 is not None or beta2 is not None:
            old1, old2 = group["betas"]
            group["betas"] = (old1 if beta1 is None else beta1, old2 if beta2 is None else beta2)
        if eps is not None:
            group["eps"] = eps
    params.optimizer.step()
    params.step += 1
