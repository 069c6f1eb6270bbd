import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import DimensionMismatch


class BeatTrack(BaseModel):
    """Binary per-frame beat indicators."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    flags: np.ndarray
    fps: int = Field(default=20, gt=0)

    @field_validator("flags", mode="before")
    @classmethod
    def _as_flags(cls, value):
        flags = np.array(value, dtype=np.uint8, copy=True).reshape(-1)
        if not np.isin(flags, (0, 1)).all():
            raise DimensionMismatch("beat flags must be 0 or 1")
        flags.setflags(write=False)
        return flags

    @classmethod
    def from_frames(cls, frames, length: int, fps: int = 20) -> "BeatTrack":
        flags = np.zeros(length, dtype=np.uint8)
        flags[np.asarray(list(frames), dtype=np.int64)] = 1
        return cls(flags=flags, fps=fps)

    def __len__(self) -> int:
        return int(self.flags.shape[0])

    def frames(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.flags)]

    def times(self) -> np.ndarray:
        return np.flatnonzero(self.flags).astype(np.float64) / self.fps

    def window(self, start: int, stop: int) -> "BeatTrack":
        """Slice [start, stop); positions outside the track read as no-beat."""
        out = np.zeros(stop - start, dtype=np.uint8)
        lo, hi = max(start, 0), min(stop, len(self))
        if hi > lo:
            out[lo - start: hi - start] = self.flags[lo:hi]
        return BeatTrack(flags=out, fps=self.fps)


class TTASequence(BaseModel):
    """Frames remaining until the next beat, capped at ``cap``."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    cap: int = Field(gt=0)

    @field_validator("values", mode="before")
    @classmethod
    def _as_int(cls, value):
        values = np.array(value, dtype=np.int64, copy=True).reshape(-1)
        values.setflags(write=False)
        return values

    @model_validator(mode="after")
    def _check_range(self) -> "TTASequence":
        if len(self.values) and (self.values.min() < 0 or self.values.max() > self.cap):
            raise DimensionMismatch(f"time-to-arrival values must lie in [0, {self.cap}]")
        return self
