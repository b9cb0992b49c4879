import logging

from sticker_da.core.context import RuntimeContext
from sticker_da.core.exceptions import ConfigError
from sticker_da.data.schemas import Dataset
from sticker_da.data.utils import derive_seed
from sticker_da.model import (
    ModelBundle,
    Phase,
    build_model,
    config_fingerprint,
    load_model,
    save_checkpoint,
    warm_start_backbone,
)
from sticker_da.sticker import sticker_task_classes
from sticker_da.training import adapt_target, pretrain_goal, pretrain_sticker

from .artifacts import ArtifactStore
from .schemas import PhaseResult

logger = logging.getLogger(__name__)


class TrainingService:
    """Runs the three training phases against the artifacts of a run directory."""

    def __init__(self, runtime_context: RuntimeContext):
        self.runtime_context = runtime_context
        self.settings = runtime_context.settings
        self.metrics = runtime_context.metrics
        self.artifacts = ArtifactStore(runtime_context.run_dir)

    @property
    def use_subsidiary(self) -> bool:
        return self.settings.train.use_subsidiary

    def fingerprint(self, goal_classes: int) -> str:
        sticker = self.settings.sticker
        return config_fingerprint(
            self.settings.model, goal_classes, sticker_task_classes(sticker.task, sticker.n_classes)
        )

    def load_phase(self, phase: Phase, goal_classes: int) -> ModelBundle:
        path = self.artifacts.require_checkpoint(phase)
        m, _ = load_model(path, self.settings.model, self.fingerprint(goal_classes))
        return m.to(self.runtime_context.device)

    def pre_adaptation_phase(self) -> Phase:
        """The checkpoint adaptation starts from: sticker-pretrained, or goal-only for the baseline."""
        return "source_sticker" if self.use_subsidiary else "source_goal"

    def _save(self, m: ModelBundle, phase: Phase, goal_classes: int) -> str:
        path = self.artifacts.checkpoint_path(phase)
        save_checkpoint(path, m, phase, self.fingerprint(goal_classes), extra={"seed": self.settings.seed})
        return str(path)

    def pretrain_goal(self) -> PhaseResult:
        source = self.artifacts.load_dataset("source")
        stickered_source = self.artifacts.load_dataset("stickered_source") if self.use_subsidiary else None

        sticker = self.settings.sticker
        m = build_model(
            self.settings.model,
            source.goal_classes,
            sticker_task_classes(sticker.task, sticker.n_classes),
            seed=derive_seed(self.settings.seed, "init"),
        )
        if self.settings.model.warm_start is not None:
            warm_start_backbone(m, self.settings.model.warm_start)
        m.to(self.runtime_context.device)

        report = pretrain_goal(
            m,
            source,
            stickered_source,
            self.settings.train,
            seed=derive_seed(self.settings.seed, "source_goal"),
            metrics=self.metrics,
        )
        checkpoint = self._save(m, "source_goal", source.goal_classes)
        return PhaseResult(phase="source_goal", checkpoint=checkpoint, report=report)

    def pretrain_sticker(self) -> PhaseResult:
        if not self.use_subsidiary:
            raise ConfigError("sticker pretraining is disabled by train.use_subsidiary = false")
        stickered_source = self.artifacts.load_dataset("stickered_source")
        pseudo_oos = self.artifacts.load_dataset("pseudo_oos") if self.settings.train.use_oos else None
        m = self.load_phase("source_goal", stickered_source.goal_classes)

        report = pretrain_sticker(
            m,
            stickered_source,
            pseudo_oos,
            self.settings.train,
            seed=derive_seed(self.settings.seed, "source_sticker"),
            metrics=self.metrics,
        )
        checkpoint = self._save(m, "source_sticker", stickered_source.goal_classes)
        return PhaseResult(phase="source_sticker", checkpoint=checkpoint, report=report)

    def adapt(self) -> PhaseResult:
        target = self.artifacts.load_dataset("target")
        stickered_target: Dataset | None = None
        if self.use_subsidiary:
            stickered_target = self.artifacts.load_dataset("stickered_target")
        m = self.load_phase(self.pre_adaptation_phase(), target.goal_classes)

        report = adapt_target(
            m,
            target,
            stickered_target,
            self.settings.train,
            seed=derive_seed(self.settings.seed, "adapted"),
            metrics=self.metrics,
        )
        checkpoint = self._save(m, "adapted", target.goal_classes)
        return PhaseResult(phase="adapted", checkpoint=checkpoint, report=report)
