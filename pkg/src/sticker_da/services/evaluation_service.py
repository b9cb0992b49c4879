import logging

from sticker_da.core.context import RuntimeContext
from sticker_da.core.exceptions import ConfigError
from sticker_da.metrics import (
    SUBSIDIARY_TASKS,
    accuracy,
    feature_a_distance_report,
    oos_mass,
    suitability,
)
from sticker_da.metrics.plots import plot_convergence, plot_suitability
from sticker_da.training.metrics_log import read_metrics

from .artifacts import ArtifactStore
from .schemas import EvalResult, SuitabilityResult
from .training_service import TrainingService

logger = logging.getLogger(__name__)


class EvaluationService:
    """Evaluation, suitability scoring and plots for a run directory."""

    def __init__(self, runtime_context: RuntimeContext, training_service: TrainingService):
        self.runtime_context = runtime_context
        self.settings = runtime_context.settings
        self.artifacts = ArtifactStore(runtime_context.run_dir)
        self.training = training_service

    def evaluate(self) -> EvalResult:
        source = self.artifacts.load_dataset("source")
        target = self.artifacts.load_dataset("target")
        adapted = self.training.load_phase("adapted", source.goal_classes)
        before = self.training.load_phase(self.training.pre_adaptation_phase(), source.goal_classes)

        result = EvalResult(
            source_acc=accuracy(adapted, source),
            target_acc=accuracy(adapted, target) if target.has_goal_labels else None,
            source_only_target_acc=accuracy(before, target) if target.has_goal_labels else None,
            feature_distance=feature_a_distance_report(
                before, adapted, source, target, self.settings.seed, self.settings.metrics.formula_variant
            ),
        )
        if self.training.use_subsidiary and self.artifacts.has_dataset("stickered_target"):
            result.target_sticker_acc = accuracy(
                adapted, self.artifacts.load_dataset("stickered_target"), head="subsidiary"
            )
            sticker_model = self.training.load_phase("source_sticker", source.goal_classes)
            if self.artifacts.has_dataset("pseudo_oos"):
                result.oos_mass_pseudo_oos = oos_mass(sticker_model, self.artifacts.load_dataset("pseudo_oos"))
            result.oos_mass_stickered = oos_mass(sticker_model, self.artifacts.load_dataset("stickered_source"))

        path = self.runtime_context.run_dir / "eval.json"
        path.write_text(result.model_dump_json(indent=2), encoding="utf-8")
        logger.info(f"Wrote evaluation to {path}")
        return result

    def suitability(self, task: str | None = None) -> SuitabilityResult:
        """Score one subsidiary task, or every implemented task with `task="all"`."""
        task = task or self.settings.sticker.task
        if task == "all":
            tasks = list(SUBSIDIARY_TASKS)
        elif task in SUBSIDIARY_TASKS:
            tasks = [task]
        else:
            raise ConfigError(f"unknown subsidiary task '{task}', expected one of {SUBSIDIARY_TASKS} or 'all'")

        source = self.artifacts.load_dataset("source")
        goal_model = self.training.load_phase("source_goal", source.goal_classes)
        reports = [suitability(source, t, self.settings, goal_model) for t in tasks]

        for report in reports:
            path = self.runtime_context.run_dir / f"suitability_{report.task}.json"
            path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        plot = plot_suitability(reports, self.artifacts.plots_dir / f"suitability_{task}.png")
        return SuitabilityResult(reports=reports, plot=str(plot))

    def plot_convergence(self) -> list[str]:
        path = self.artifacts.require("metrics", self.runtime_context.run_dir / "metrics.jsonl")
        return [str(p) for p in plot_convergence(read_metrics(path), self.artifacts.plots_dir)]
