# Run configuration
from .config_schemas import DataConfig, ModelConfig, RunConfig, TrainConfig

# Reports
from .report_schemas import AblationReport, CurvePoint, EvaluationReport, LossReport

# Command payloads
from .common_schemas import CommandSummary, ErrorResponse, StatusEnum

__all__ = [
    # Run configuration
    "DataConfig",
    "ModelConfig",
    "RunConfig",
    "TrainConfig",

    # Reports
    "AblationReport",
    "CurvePoint",
    "EvaluationReport",
    "LossReport",

    # Command payloads
    "CommandSummary",
    "ErrorResponse",
    "StatusEnum",
]
