"""
Run configuration: the JSON file passed to ``beatdance train``. Unknown keys are
rejected; defaults are the full-scale values and desk-scale runs override them.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    layers: int = Field(default=12, gt=0)
    heads: int = Field(default=10, gt=0)
    d_model: int = Field(default=640, gt=0)
    ffn: int = Field(default=1920, gt=0)
    n: int = Field(default=7, gt=0)
    m: int = Field(default=10, gt=0)
    w_ctx: int = Field(default=40, gt=0)
    w_style: int = Field(default=40, gt=0)
    mag_layer: int = Field(default=2, ge=0)  # fuse after the third layer
    mag_beta: float = Field(default=1.0, gt=0)
    tta_cap: int = Field(default=40, gt=0)
    fusion: Literal["cln", "mt"] = "cln"
    long_history: Literal["on", "off"] = "on"
    style_layers: int = Field(default=3, gt=0)
    style_source: Literal["both", "music"] = "both"
    dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    residual_head: bool = False
    cln_hidden: Optional[int] = Field(default=None, gt=0)
    history_kernel: int = Field(default=3, gt=0)
    fps: int = Field(default=20, gt=0)
    joint_count: int = Field(default=24, gt=0)

    @model_validator(mode="after")
    def _check_shapes(self) -> "ModelConfig":
        if self.d_model % self.heads:
            raise ValueError(f"d_model {self.d_model} is not divisible by heads {self.heads}")
        if self.mag_layer >= self.layers:
            raise ValueError(f"mag_layer {self.mag_layer} must be below layers {self.layers}")
        if self.history_kernel % 2 == 0:
            raise ValueError("history_kernel must be odd")
        return self

    @property
    def condition_hidden(self) -> int:
        return self.cln_hidden or self.ffn


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    lr: float = Field(default=1e-4, gt=0)
    decay_steps: list[int] = Field(default_factory=lambda: [35000, 60000])
    batch: int = Field(default=128, gt=0)
    iters: int = Field(default=100000, ge=0)
    lambda_rec: float = Field(default=1.0, ge=0)
    lambda_foot: float = Field(default=0.1, ge=0)
    lambda_trip: float = Field(default=0.1, ge=0)
    margin: float = Field(default=0.2, ge=0)
    scheme: Literal["unpaired", "paired"] = "unpaired"
    seed: int = Field(default=0, ge=0)
    history_len: int = Field(default=200, gt=0)
    triplet_batch: int = Field(default=16, gt=0)
    checkpoint_every: int = Field(default=5000, gt=0)
    log_every: int = Field(default=100, gt=0)
    workers: int = Field(default=0, ge=0)
    contact_threshold: float = Field(default=0.01, gt=0)
    mirror: bool = False

    @field_validator("decay_steps")
    @classmethod
    def _sorted(cls, value: list[int]) -> list[int]:
        if any(b <= a for a, b in zip(value, value[1:])) or any(v <= 0 for v in value):
            raise ValueError("decay_steps must be positive and strictly increasing")
        return value


class DataConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    manifest: str = "manifest.json"


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    data: DataConfig = Field(default_factory=DataConfig)

    @model_validator(mode="after")
    def _check_history(self) -> "RunConfig":
        if self.model.long_history == "on" and self.train.history_len < 2 * self.model.m + self.model.n:
            raise ValueError(
                f"history_len {self.train.history_len} is shorter than one history window (2m+n)"
            )
        return self
