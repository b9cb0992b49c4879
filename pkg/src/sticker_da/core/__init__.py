from .exceptions import (
    CheckpointMismatchError,
    ConfigError,
    DatasetFormatError,
    EvaluationError,
    InvalidStickerSpecError,
    LabelSetMismatchError,
    LossInputError,
    MemoryBankError,
    NumericError,
    PhaseContractError,
    PhaseDependencyError,
    ScheduleError,
    StickerDAError,
)
from .settings import Settings, load_settings

__all__ = [
    "Settings",
    "load_settings",
    "StickerDAError",
    "ConfigError",
    "DatasetFormatError",
    "EvaluationError",
    "InvalidStickerSpecError",
    "NumericError",
    "LossInputError",
    "MemoryBankError",
    "ScheduleError",
    "LabelSetMismatchError",
    "PhaseContractError",
    "PhaseDependencyError",
    "CheckpointMismatchError",
]
