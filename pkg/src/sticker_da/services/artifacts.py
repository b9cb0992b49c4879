import logging
from pathlib import Path

import torch

from sticker_da.core.exceptions import PhaseDependencyError
from sticker_da.data.schemas import Dataset
from sticker_da.model.checkpoint import Phase

logger = logging.getLogger(__name__)

# which command produces each artifact, used in dependency errors
PRODUCERS = {
    "source": "make-data",
    "target": "make-data",
    "stickered_source": "prepare-stickers",
    "stickered_target": "prepare-stickers",
    "pseudo_oos": "make-oos",
    "source_goal": "pretrain-goal",
    "source_sticker": "pretrain-sticker",
    "adapted": "adapt",
    "metrics": "pretrain-goal",
}


class ArtifactStore:
    """Datasets and checkpoints of one run directory."""

    def __init__(self, run_dir: Path):
        self.run_dir = run_dir
        self.datasets_dir = run_dir / "datasets"
        self.checkpoints_dir = run_dir / "checkpoints"
        self.plots_dir = run_dir / "plots"

    def dataset_path(self, name: str) -> Path:
        return self.datasets_dir / f"{name}.pt"

    def checkpoint_path(self, phase: Phase) -> Path:
        return self.checkpoints_dir / f"{phase}.pt"

    def has_dataset(self, name: str) -> bool:
        return self.dataset_path(name).exists()

    def save_dataset(self, name: str, ds: Dataset) -> Path:
        path = self.dataset_path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(ds.to_state(), path)
        logger.debug(f"Saved dataset {name} ({len(ds)} samples) to {path}")
        return path

    def load_dataset(self, name: str) -> Dataset:
        path = self.require(name, self.dataset_path(name))
        return Dataset.from_state(torch.load(path, weights_only=True))

    def require_checkpoint(self, phase: Phase) -> Path:
        return self.require(phase, self.checkpoint_path(phase))

    def require(self, artifact: str, path: Path) -> Path:
        if not path.exists():
            raise PhaseDependencyError(artifact, f"expected at {path}, run `sticker-da {PRODUCERS[artifact]}` first")
        return path
