import logging

from sticker_da.core.context import RuntimeContext
from sticker_da.core.exceptions import ConfigError
from sticker_da.data.folder import load_image_folder
from sticker_da.data.schemas import Dataset
from sticker_da.data.synthetic import make_synthetic_domain_pair
from sticker_da.data.utils import derive_seed
from sticker_da.oos import build_pseudo_oos_dataset
from sticker_da.sticker import build_sticker_dataset, sticker_task_classes, task_rotates_glyph

from .artifacts import ArtifactStore
from .schemas import DataResult, DatasetSummary

logger = logging.getLogger(__name__)


class DataService:
    """Builds and stores the datasets of a run: D_s, D_t, D_{s,n}, D_{t,n} and D_s^(od)."""

    def __init__(self, runtime_context: RuntimeContext):
        self.runtime_context = runtime_context
        self.settings = runtime_context.settings
        self.artifacts = ArtifactStore(runtime_context.run_dir)

    @property
    def sticker_classes(self) -> int:
        sticker = self.settings.sticker
        return sticker_task_classes(sticker.task, sticker.n_classes)

    def _save(self, name: str, ds: Dataset) -> DatasetSummary:
        self.artifacts.save_dataset(name, ds)
        return DatasetSummary(
            name=name,
            domain_tag=ds.domain_tag,
            size=len(ds),
            goal_classes=ds.goal_classes,
            subsidiary_classes=ds.subsidiary_classes,
            warnings=list(ds.warnings),
        )

    def make_data(self) -> DataResult:
        """Load the configured image folders, or synthesize a shifted domain pair."""
        data = self.settings.data
        if (data.source_root is None) != (data.target_root is None):
            raise ConfigError("data.source_root and data.target_root must be set together")

        if data.source_root is not None and data.target_root is not None:
            size = (data.image_size, data.image_size)
            source = load_image_folder(data.source_root, size, "source", self.sticker_classes)
            target = load_image_folder(data.target_root, size, "target", self.sticker_classes)
            if source.class_names != target.class_names:
                raise ConfigError("source and target image folders must have the same class directories")
        else:
            source, target = make_synthetic_domain_pair(
                data.n_classes,
                data.n_per_class,
                data.shift,
                seed=self.settings.seed,
                image_size=data.image_size,
                subsidiary_classes=self.sticker_classes,
                paired=data.paired_target,
            )

        return DataResult(datasets=[self._save("source", source), self._save("target", target)])

    def _stickered(self, ds: Dataset, domain: str) -> Dataset:
        sticker = self.settings.sticker
        return build_sticker_dataset(
            ds,
            sticker.task,
            derive_seed(self.settings.seed, "stickers", domain),
            sticker.mixup_ratio,
            n_classes=sticker.n_classes,
            scale_range=sticker.scale_range,
            location_mode=sticker.location_mode,
            glyph_seed=sticker.glyph_seed,
        )

    def prepare_stickers(self) -> DataResult:
        """Build D_{s,n} and D_{t,n} for the configured sticker task."""
        source = self.artifacts.load_dataset("source")
        target = self.artifacts.load_dataset("target")
        return DataResult(
            datasets=[
                self._save("stickered_source", self._stickered(source, "source")),
                self._save("stickered_target", self._stickered(target, "target")),
            ]
        )

    def make_oos(self) -> DataResult:
        """Build the pseudo-OOS set from the source domain."""
        source = self.artifacts.load_dataset("source")
        sticker, oos = self.settings.sticker, self.settings.oos
        pseudo_oos = build_pseudo_oos_dataset(
            source,
            oos.grid,
            oos.sticker_prob,
            derive_seed(self.settings.seed, "oos"),
            subsidiary_classes=self.sticker_classes,
            lam=sticker.mixup_ratio,
            n_classes=sticker.n_classes,
            scale_range=sticker.scale_range,
            location_mode=sticker.location_mode,
            glyph_seed=sticker.glyph_seed,
            rotate=task_rotates_glyph(sticker.task),
        )
        return DataResult(datasets=[self._save("pseudo_oos", pseudo_oos)])
