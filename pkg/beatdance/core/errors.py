"""
Error hierarchy shared by every beatdance module.

Each error carries a ``detail`` message and a stable ``error_code``; the family
decides the CLI exit code (2 usage, 3 data, 4 numeric).
"""

from typing import Optional


class BeatDanceError(Exception):
    """Base error with a machine-readable code."""
    exit_code: int = 1

    def __init__(self, detail: str, error_code: Optional[str] = None):
        super().__init__(detail)
        self.detail = detail
        self.error_code = error_code or type(self).__name__

    def to_payload(self) -> dict:
        return {"error": self.error_code, "detail": self.detail}


class UsageError(BeatDanceError):
    exit_code = 2


class DataError(BeatDanceError):
    exit_code = 3


class NumericError(BeatDanceError):
    exit_code = 4


# Usage
class ConfigError(UsageError):
    pass


# Data
class BadMagic(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class TruncatedFile(DataError):
    pass


class IoFailure(DataError):
    pass


class UnsupportedSkeleton(DataError):
    pass


class BadRotation(DataError):
    pass


class TooShort(DataError):
    pass


class BadStyle(DataError):
    pass


class NoEligibleClip(DataError):
    pass


class InsufficientHistory(DataError):
    pass


class BadLength(DataError):
    pass


class EmptyBeatSet(DataError):
    pass


class TooFew(DataError):
    pass


class TooFewClips(DataError):
    pass


# Numeric
class ShapeMismatch(NumericError):
    pass


class NonFiniteValue(NumericError):
    pass


class NonFiniteGrad(NumericError):
    pass


class NonFiniteActivation(NumericError):
    pass


class DegenerateCovariance(NumericError):
    pass
