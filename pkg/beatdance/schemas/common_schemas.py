"""
Payloads printed by the command-line surface.
"""

from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel


class StatusEnum(str, Enum):
    SUCCESS = "success"
    ERROR = "error"


class ErrorResponse(BaseModel):
    """Machine-readable failure written to standard error."""
    error: str
    detail: str


class CommandSummary(BaseModel):
    """One-line JSON summary written to standard output."""
    status: StatusEnum = StatusEnum.SUCCESS
    command: str
    outputs: list[str] = []
    data: Optional[dict[str, Any]] = None
