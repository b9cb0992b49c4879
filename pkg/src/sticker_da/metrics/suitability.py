import logging

from pydantic import BaseModel, Field, model_validator

from sticker_da.core.exceptions import ConfigError
from sticker_da.core.settings import PRETEXT_TASKS, STICKER_TASKS, FormulaVariant, Settings, SubsidiaryTask
from sticker_da.data.schemas import Dataset
from sticker_da.model.bundle import ModelBundle
from sticker_da.pretext import build_pretext_dataset
from sticker_da.sticker import build_sticker_dataset

from .discrepancy import dsm_from_a_distance, measure_a_distance, tsm
from .evaluation import extract_features

logger = logging.getLogger(__name__)

SUBSIDIARY_TASKS: tuple[SubsidiaryTask, ...] = (*STICKER_TASKS, *PRETEXT_TASKS)


class SuitabilityReport(BaseModel):
    task: SubsidiaryTask
    dsm: float = Field(ge=0, le=1)
    tsm: float = Field(ge=0, le=1)
    zeta_d: float
    zeta_n: float
    zeta: float
    passes: bool = Field(description="dsm + tsm > zeta")
    passes_dsm: bool = Field(description="dsm > zeta_d")
    passes_tsm: bool = Field(description="tsm > zeta_n")
    psi: float = Field(description="Held-out error of the domain probe")
    d_a: float
    formula_variant: FormulaVariant
    n_subsidiary_classes: int
    warnings: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_verdicts(self) -> "SuitabilityReport":
        if self.passes != (self.dsm + self.tsm > self.zeta):
            raise ValueError("passes must equal dsm + tsm > zeta")
        return self


def build_task_dataset(ds: Dataset, task: SubsidiaryTask, settings: Settings, seed: int) -> Dataset:
    """The intervened copy of `ds` for any subsidiary task, labelled for that task."""
    if task in STICKER_TASKS:
        sticker = settings.sticker
        return build_sticker_dataset(
            ds,
            task,
            seed,
            sticker.mixup_ratio,
            n_classes=sticker.n_classes,
            scale_range=sticker.scale_range,
            location_mode=sticker.location_mode,
            glyph_seed=sticker.glyph_seed,
        )
    if task in PRETEXT_TASKS:
        return build_pretext_dataset(ds, task, seed)
    raise ConfigError(f"unknown subsidiary task '{task}', expected one of {SUBSIDIARY_TASKS}")


def suitability(
    source: Dataset,
    task: SubsidiaryTask,
    settings: Settings,
    goal_model: ModelBundle,
    seed: int | None = None,
) -> SuitabilityReport:
    """
    Score a subsidiary task: DSM from a domain probe between the source and its
    intervened copy, TSM from a subsidiary-task probe, both on the frozen backbone of
    the goal-pretrained `goal_model`.
    """
    seed = settings.seed if seed is None else seed
    cfg = settings.metrics
    intervened = build_task_dataset(source, task, settings, seed)

    source_features = extract_features(goal_model, source)
    intervened_features = extract_features(goal_model, intervened)
    distance = measure_a_distance(
        source_features, intervened_features, seed, cfg.formula_variant, cfg.probe_test_size, cfg.probe_max_iter
    )
    dsm = dsm_from_a_distance(distance.d_a)
    tsm_value = tsm(
        intervened,
        lambda _: intervened_features,
        seed,
        cfg.tsm_max_classes,
        cfg.probe_test_size,
        cfg.probe_max_iter,
    )

    warnings = []
    if distance.degenerate:
        warnings.append("degenerate backbone features, domain probe error set to 0.5")
    labels = intervened.subsidiary_labels().numpy()
    report = SuitabilityReport(
        task=task,
        dsm=dsm,
        tsm=tsm_value,
        zeta_d=cfg.zeta_d,
        zeta_n=cfg.zeta_n,
        zeta=cfg.zeta,
        passes=dsm + tsm_value > cfg.zeta,
        passes_dsm=dsm > cfg.zeta_d,
        passes_tsm=tsm_value > cfg.zeta_n,
        psi=distance.psi,
        d_a=distance.d_a,
        formula_variant=cfg.formula_variant,
        n_subsidiary_classes=min(cfg.tsm_max_classes, len(set(labels.tolist()))),
        warnings=warnings,
    )
    logger.info(f"{task}: DSM={dsm:.3f} TSM={tsm_value:.3f} passes={report.passes}")
    return report
