from pydantic import BaseModel, Field

from sticker_da.metrics.evaluation import FeatureDistanceReport
from sticker_da.metrics.suitability import SuitabilityReport
from sticker_da.model.checkpoint import Phase
from sticker_da.training.schemas import PhaseReport


class DatasetSummary(BaseModel):
    """A dataset written to the run directory."""

    name: str
    domain_tag: str
    size: int
    goal_classes: int
    subsidiary_classes: int
    warnings: list[str] = Field(default_factory=list)


class DataResult(BaseModel):
    datasets: list[DatasetSummary]


class PhaseResult(BaseModel):
    """Result of one training phase."""

    phase: Phase
    checkpoint: str = Field(description="Path of the checkpoint written")
    report: PhaseReport


class EvalResult(BaseModel):
    """Evaluation of the adapted model."""

    source_acc: float
    target_acc: float | None = Field(default=None, description="Goal accuracy on the target, when it has labels")
    source_only_target_acc: float | None = Field(
        default=None, description="Target accuracy of the model before adaptation"
    )
    target_sticker_acc: float | None = Field(default=None, description="Sticker accuracy on stickered target data")
    oos_mass_pseudo_oos: float | None = Field(
        default=None, description="Mean OOS-node mass on pseudo-OOS data after sticker pretraining"
    )
    oos_mass_stickered: float | None = Field(
        default=None, description="Mean OOS-node mass on stickered source data after sticker pretraining"
    )
    feature_distance: FeatureDistanceReport


class SuitabilityResult(BaseModel):
    reports: list[SuitabilityReport]
    plot: str
