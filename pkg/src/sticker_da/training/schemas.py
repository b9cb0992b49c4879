from pydantic import BaseModel, Field

from sticker_da.model.checkpoint import Phase


class PhaseReport(BaseModel):
    phase: Phase
    epochs: int
    steps: int = Field(description="Optimizer micro-steps applied")
    epoch_losses: dict[str, list[float]] = Field(default_factory=dict, description="Mean loss per epoch, per loss")
    epoch_metrics: dict[str, list[float]] = Field(default_factory=dict, description="Per-epoch evaluation metrics")
    trained: list[str]
    checksums_before: dict[str, str]
    checksums_after: dict[str, str]

    @property
    def mutated(self) -> list[str]:
        return [name for name, digest in self.checksums_before.items() if self.checksums_after[name] != digest]
