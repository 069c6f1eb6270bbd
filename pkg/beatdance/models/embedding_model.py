import torch
from pydantic import BaseModel, ConfigDict, field_validator

from ..core.errors import NonFiniteActivation


def _finite(value: torch.Tensor, what: str) -> torch.Tensor:
    if not isinstance(value, torch.Tensor):
        value = torch.as_tensor(value, dtype=torch.float32)
    if not torch.isfinite(value.detach()).all():
        raise NonFiniteActivation(f"{what} contains non-finite values")
    return value


class StyleEmbedding(BaseModel):
    """H_style (w_style x d_s, optionally batched) with the exemplar ids it came from."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    h_style: torch.Tensor
    music_id: str = ""
    motion_id: str = ""

    @field_validator("h_style", mode="before")
    @classmethod
    def _check(cls, value):
        return _finite(value, "style embedding")

    def pooled(self) -> torch.Tensor:
        return self.h_style.mean(dim=-2)


class LongHistoryEmbedding(BaseModel):
    """E_hist (n x d) and the attention weights over history windows."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    e_hist: torch.Tensor
    weights: torch.Tensor

    @field_validator("e_hist", mode="before")
    @classmethod
    def _check(cls, value):
        return _finite(value, "long-history embedding")


class GeneratorOutput(BaseModel):
    """Predicted future poses (n x D) and foot-contact logits (n x 2)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    poses: torch.Tensor
    contact_logits: torch.Tensor

    @field_validator("poses", "contact_logits", mode="before")
    @classmethod
    def _check(cls, value):
        return _finite(value, "generator output")
