from typing import Literal

import torch
from pydantic import BaseModel

from sticker_da.core.exceptions import EvaluationError
from sticker_da.core.settings import FormulaVariant
from sticker_da.data.batching import iterate_batches
from sticker_da.data.schemas import Dataset
from sticker_da.model.bundle import ModelBundle, device_of, features, forward_goal, forward_subsidiary

from .discrepancy import measure_a_distance

Head = Literal["goal", "subsidiary"]

EVAL_BATCH_SIZE = 256


@torch.no_grad()
def _run(m: ModelBundle, ds: Dataset, fn) -> torch.Tensor:
    was_training = m.training
    m.eval()
    device = device_of(m)
    try:
        outs = [fn(m, batch.to(device)).cpu() for batch in iterate_batches(ds, EVAL_BATCH_SIZE, seed=0, shuffle=False)]
    finally:
        m.train(was_training)
    return torch.cat(outs) if outs else torch.empty(0)


def extract_features(m: ModelBundle, ds: Dataset) -> torch.Tensor:
    """Frozen backbone features h(x) of every sample, in dataset order."""
    return _run(m, ds, features)


def predict(m: ModelBundle, ds: Dataset, head: Head = "goal") -> torch.Tensor:
    return _run(m, ds, forward_goal if head == "goal" else forward_subsidiary)


def accuracy(m: ModelBundle, ds: Dataset, head: Head = "goal") -> float:
    if head == "goal":
        if not ds.has_goal_labels:
            raise EvaluationError(f"dataset {ds.domain_tag} has no goal labels to score")
        labels = ds.goal_labels()
    else:
        if not ds.has_subsidiary_labels:
            raise EvaluationError(f"dataset {ds.domain_tag} has no subsidiary labels to score")
        labels = ds.subsidiary_labels()
    return float((predict(m, ds, head).argmax(1) == labels).float().mean())


def oos_mass(m: ModelBundle, ds: Dataset) -> float:
    """Mean softmax mass the subsidiary head puts on the OOS node."""
    probs = predict(m, ds, "subsidiary").softmax(1)
    return float(probs[:, -1].mean())


class FeatureDistanceReport(BaseModel):
    d_a_before: float
    d_a_after: float
    psi_before: float
    psi_after: float
    formula_variant: FormulaVariant


def feature_a_distance_report(
    m_before: ModelBundle,
    m_after: ModelBundle,
    source: Dataset,
    target: Dataset,
    seed: int,
    formula_variant: FormulaVariant = "standard",
) -> FeatureDistanceReport:
    """Source-target A-distance on backbone features before and after adaptation."""
    before = measure_a_distance(
        extract_features(m_before, source), extract_features(m_before, target), seed, formula_variant
    )
    after = measure_a_distance(extract_features(m_after, source), extract_features(m_after, target), seed, formula_variant)
    return FeatureDistanceReport(
        d_a_before=before.d_a,
        d_a_after=after.d_a,
        psi_before=before.psi,
        psi_after=after.psi,
        formula_variant=formula_variant,
    )
