from typing import Optional

from pydantic import BaseModel, Field


class LossReport(BaseModel):
    """One training step: loss components, their weights and the weighted total."""
    step: int = Field(ge=0)
    l_rec: float = Field(ge=0)
    l_foot: float = Field(ge=0)
    l_trip: float = Field(ge=0)
    total: float = Field(ge=0)
    lr: float = Field(gt=0)
    lambda_rec: float = 1.0
    lambda_foot: float = 0.1
    lambda_trip: float = 0.1

    def log_record(self) -> dict:
        """The per-step JSON-lines record."""
        return self.model_dump(include={"step", "l_rec", "l_foot", "l_trip", "total", "lr"})


class CurvePoint(BaseModel):
    t: float
    fid_k: float


class EvaluationReport(BaseModel):
    fid_k: float
    fid_g: float
    dist_k: float
    dist_g: float
    beat_align: Optional[float] = None
    beat_align_shuffled: Optional[float] = None
    style_acc: Optional[float] = None
    curve: list[CurvePoint] = Field(default_factory=list)
    generated_count: int = 0
    reference_count: int = 0


class AblationReport(BaseModel):
    final_losses: dict[str, float]
    pairwise_differences: dict[str, float]
