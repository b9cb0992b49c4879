import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource

from .exceptions import ConfigError

StickerTask = Literal["sticker-loc", "sticker-rot", "sticker-clsf"]
PretextTask = Literal["image-rotation", "patch-location", "jigsaw"]
SubsidiaryTask = Literal["sticker-loc", "sticker-rot", "sticker-clsf", "image-rotation", "patch-location", "jigsaw"]
ShiftName = Literal["color", "noise", "blur"]
LossName = Literal["subsidiary", "self_training", "diversity"]
FormulaVariant = Literal["standard", "paper_verbatim"]
BankSpace = Literal["backbone", "goal_logits"]
LocationMode = Literal["uniform", "periphery", "center"]

STICKER_TASKS: tuple[StickerTask, ...] = ("sticker-loc", "sticker-rot", "sticker-clsf")
PRETEXT_TASKS: tuple[PretextTask, ...] = ("image-rotation", "patch-location", "jigsaw")


class ShiftSpec(BaseModel):
    name: ShiftName = Field(default="color", description="Deterministic corruption applied to the target domain")
    magnitude: float = Field(default=0.6, ge=0.0, le=1.0, description="Shift strength, 0 means no corruption")


class DataSettings(BaseModel):
    image_size: int = Field(default=48, ge=32, description="Square image side in pixels")
    n_classes: int = Field(default=4, ge=2, description="Goal classes of the synthetic domain pair")
    n_per_class: int = Field(default=100, ge=1, description="Synthetic samples per class and domain")
    shift: ShiftSpec = Field(default_factory=ShiftSpec)
    paired_target: bool = Field(
        default=True,
        description="Render the target from the same instances as the source (magnitude 0 gives identical pixels)",
    )
    source_root: Path | None = Field(default=None, description="Image-folder source domain (overrides synthesis)")
    target_root: Path | None = Field(default=None, description="Image-folder target domain (overrides synthesis)")


class StickerSettings(BaseModel):
    task: StickerTask = Field(default="sticker-clsf", description="Sticker subsidiary task")
    n_classes: int = Field(default=10, ge=2, le=26, description="Number of sticker classes |C_n|, paper_default 10")
    mixup_ratio: float = Field(default=0.4, ge=0.0, le=1.0, description="Mixup ratio lambda, paper_default 0.4")
    scale_range: tuple[float, float] = Field(
        default=(0.1, 0.4),
        description="Sticker-to-image side ratio range, paper_default [0.1, 0.4]; [0.4, 0.7] is the alternative preset",
    )
    location_mode: LocationMode = Field(default="uniform", description="Where sticker centres may be sampled")
    glyph_seed: int = Field(default=0, description="Seed choosing which glyphs of the bundled alphabet are used")

    @field_validator("scale_range")
    @classmethod
    def _check_scale_range(cls, value: tuple[float, float]) -> tuple[float, float]:
        lo, hi = value
        if not 0.0 < lo <= hi <= 1.0:
            raise ValueError(f"scale_range must satisfy 0 < lo <= hi <= 1, got {value}")
        return value


class OOSSettings(BaseModel):
    grid: int = Field(default=6, ge=2, description="Patch grid for pseudo-OOS shuffling, paper_default 6")
    sticker_prob: float = Field(default=0.5, ge=0.0, le=1.0, description="Probability a pseudo-OOS sample is stickered")


class ModelSettings(BaseModel):
    channels: list[int] = Field(default=[32, 64, 128], description="Output channels of each backbone block")
    feature_dim: int = Field(default=128, ge=1, description="Backbone feature dimension d")
    bottleneck_dim: int = Field(default=128, ge=1, description="Bottleneck width of the goal and sticker heads")
    warm_start: Path | None = Field(default=None, description="Checkpoint whose backbone initialises h")

    @field_validator("channels")
    @classmethod
    def _check_channels(cls, value: list[int]) -> list[int]:
        if len(value) < 3 or any(c <= 0 for c in value):
            raise ValueError("channels needs at least 3 positive entries (the sticker head taps the penultimate block)")
        return value


class TrainSettings(BaseModel):
    lr: float = Field(default=1e-3, gt=0, description="Adam learning rate, paper_default 1e-3")
    beta1: float = Field(default=0.9, gt=0, lt=1, description="Adam momentum, paper_default 0.9")
    beta2: float = Field(default=0.999, gt=0, lt=1, description="Adam second-moment coefficient")
    batch_size: int = Field(default=64, ge=1, description="Batch size, paper_default 64")
    epochs_goal: int = Field(default=20, ge=1, description="Goal pretraining epochs")
    epochs_sticker: int = Field(default=20, ge=1, description="Sticker pretraining epochs")
    oos_batch_fraction: float = Field(
        default=0.5, gt=0, le=1, description="Pseudo-OOS batch size as a fraction of the stickered batch"
    )
    epochs_adapt: int = Field(default=15, ge=1, description="Target adaptation epochs, paper_default 15")
    label_smoothing: float = Field(default=0.1, ge=0.0, lt=1.0, description="Label smoothing of the goal loss")
    temperature: float = Field(default=0.05, gt=0, description="Memory-bank softmax temperature")
    bank_space: BankSpace = Field(default="backbone", description="Feature space stored in the memory bank")
    schedule: list[LossName] = Field(
        default=["subsidiary", "self_training", "diversity"],
        description="Round-robin order of the adaptation losses",
    )
    use_subsidiary: bool = Field(default=True, description="Train with the sticker task (off: adaptation baseline)")
    use_oos: bool = Field(default=True, description="Train the OOS node on pseudo-OOS data")
    use_self_training: bool = Field(default=True, description="Use the memory-bank self-training loss")
    use_diversity: bool = Field(default=True, description="Use the diversity loss")
    deterministic: bool = Field(default=True, description="Single-threaded deterministic torch kernels")

    @model_validator(mode="after")
    def _check_schedule(self) -> "TrainSettings":
        if len(set(self.schedule)) != len(self.schedule):
            raise ValueError(f"schedule lists a loss twice: {self.schedule}")
        return self


class MetricsSettings(BaseModel):
    zeta_d: float = Field(default=0.5, description="DSM threshold, paper_default 0.5")
    zeta_n: float = Field(default=0.6, description="TSM threshold, paper_default 0.6")
    zeta: float = Field(default=1.1, description="Suitability threshold on DSM + TSM, paper_default 1.1")
    formula_variant: FormulaVariant = Field(default="standard", description="A-distance formula")
    probe_test_size: float = Field(default=0.3, gt=0, lt=1, description="Held-out fraction for linear probes")
    probe_max_iter: int = Field(default=500, ge=1, description="Iteration budget of the linear probes")
    tsm_max_classes: int = Field(default=4, ge=2, description="Subsidiary classes kept for TSM, paper_default 4")


class Settings(BaseSettings):
    seed: int = Field(default=0, description="Global seed")
    out_dir: Path = Field(default=Path("runs/default"), description="Run directory")

    # Default log level for the whole application
    log_level: str = Field(default="warning")
    # Log level for our own package (sticker_da)
    app_log_level: str = Field(default="info")

    data: DataSettings = Field(default_factory=DataSettings)
    sticker: StickerSettings = Field(default_factory=StickerSettings)
    oos: OOSSettings = Field(default_factory=OOSSettings)
    model: ModelSettings = Field(default_factory=ModelSettings)
    train: TrainSettings = Field(default_factory=TrainSettings)
    metrics: MetricsSettings = Field(default_factory=MetricsSettings)

    model_config = SettingsConfigDict(
        env_prefix="STICKER_DA_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        extra="ignore",
    )

    def snapshot(self) -> str:
        return self.model_dump_json(indent=2)


def _set_dotted(target: dict[str, Any], dotted_key: str, value: Any):
    *parents, leaf = dotted_key.split(".")
    node = target
    for key in parents:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override '{dotted_key}' descends into a non-section value")
    node[leaf] = value


def parse_override(raw: str) -> tuple[str, Any]:
    """
    Parse a `section.key=value` override. Values are read as JSON when possible
    (numbers, booleans, lists), otherwise kept as strings.
    """
    if "=" not in raw:
        raise ConfigError(f"override '{raw}' is not of the form key=value")
    key, text = raw.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return key.strip(), value


def load_settings(config_path: Path | None = None, overrides: dict[str, Any] | None = None) -> Settings:
    """
    Build the effective settings: overrides > config file > environment > defaults.

    The config file is TOML, or a JSON snapshot previously written by `Settings.snapshot`.
    """
    values: dict[str, Any] = {}
    if config_path is not None:
        if not config_path.exists():
            raise ConfigError(f"config file {config_path} does not exist")
        try:
            if config_path.suffix == ".json":
                values = json.loads(config_path.read_text(encoding="utf-8"))
            else:
                values = dict(TomlConfigSettingsSource(Settings, toml_file=config_path)())
        except ValueError as e:
            raise ConfigError(f"config file {config_path} does not parse: {e}") from e

    for key, value in (overrides or {}).items():
        _set_dotted(values, key, value)

    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
