"""Exceptions for the sticker-da pipeline."""


class StickerDAError(Exception):
    """Base exception for sticker-da errors."""

    pass


class ConfigError(StickerDAError):
    """Raised when a configuration value, task name or architecture is invalid."""

    pass


class DatasetFormatError(StickerDAError):
    """Raised when an image-folder dataset is missing or malformed."""

    def __init__(self, path: str, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"{path}: {detail}")


class InvalidStickerSpecError(StickerDAError):
    """Raised when a sticker cannot be rendered or applied as specified."""

    pass


class NumericError(StickerDAError):
    """Raised when a forward pass produces non-finite activations."""

    def __init__(self, batch_id: str, detail: str = "non-finite activations"):
        self.batch_id = batch_id
        super().__init__(f"batch {batch_id}: {detail}")


class LossInputError(StickerDAError):
    """Raised when a loss receives labels or probabilities outside its domain."""

    pass


class MemoryBankError(StickerDAError):
    """Raised on memory-bank misuse (unknown ids, too few rows, uninitialized bank)."""

    pass


class ScheduleError(StickerDAError):
    """Raised when a round-robin schedule names a loss without an optimizer."""

    pass


class LabelSetMismatchError(StickerDAError):
    """Raised when datasets trained together disagree on their goal label set."""

    pass


class PhaseDependencyError(StickerDAError):
    """Raised when a pipeline command runs before the artifact it depends on exists."""

    def __init__(self, artifact: str, hint: str):
        self.artifact = artifact
        self.hint = hint
        super().__init__(f"missing artifact '{artifact}' ({hint})")


class CheckpointMismatchError(StickerDAError):
    """Raised when a checkpoint's format version or config fingerprint does not match."""

    pass


class PhaseContractError(StickerDAError):
    """Raised when a training phase mutates a component it must leave frozen."""

    pass


class EvaluationError(StickerDAError):
    """Raised when a probe or accuracy cannot be computed from the data given."""

    pass
