import logging
from collections.abc import Callable

import numpy as np
import torch
from pydantic import BaseModel

from sticker_da.core.exceptions import EvaluationError
from sticker_da.core.settings import FormulaVariant
from sticker_da.data.schemas import Dataset

from .probe import linear_probe_error, to_numpy

logger = logging.getLogger(__name__)

MIN_DOMAIN_SAMPLES = 20

FeatureFn = Callable[[Dataset], torch.Tensor]


class ADistance(BaseModel):
    psi: float
    d_a: float
    formula_variant: FormulaVariant
    degenerate: bool = False


def d_a_from_error(psi: float, formula_variant: FormulaVariant = "standard") -> float:
    """standard: max(0, 2(1 − 2ψ)); paper_verbatim: 2ψ(1 − ψ)."""
    if formula_variant == "paper_verbatim":
        return 2 * psi * (1 - psi)
    return max(0.0, 2 * (1 - 2 * psi))


def measure_a_distance(
    features_a: torch.Tensor | np.ndarray,
    features_b: torch.Tensor | np.ndarray,
    seed: int,
    formula_variant: FormulaVariant = "standard",
    test_size: float = 0.3,
    max_iter: int = 500,
) -> ADistance:
    a, b = to_numpy(features_a), to_numpy(features_b)
    if len(a) < MIN_DOMAIN_SAMPLES or len(b) < MIN_DOMAIN_SAMPLES:
        raise EvaluationError(f"A-distance needs at least {MIN_DOMAIN_SAMPLES} samples per domain, got {len(a)}, {len(b)}")

    X = np.concatenate([a.reshape(len(a), -1), b.reshape(len(b), -1)]).astype(np.float64)
    y = np.concatenate([np.zeros(len(a), dtype=np.int64), np.ones(len(b), dtype=np.int64)])
    if np.ptp(X, axis=0).max() == 0:
        logger.warning("Degenerate features (all rows identical), using probe error 0.5")
        return ADistance(psi=0.5, d_a=d_a_from_error(0.5, formula_variant), formula_variant=formula_variant, degenerate=True)

    psi = linear_probe_error(X, y, seed, test_size, max_iter)
    return ADistance(psi=psi, d_a=d_a_from_error(psi, formula_variant), formula_variant=formula_variant)


def a_distance(
    features_a: torch.Tensor | np.ndarray,
    features_b: torch.Tensor | np.ndarray,
    seed: int,
    formula_variant: FormulaVariant = "standard",
) -> tuple[float, float]:
    """Proxy A-distance between two feature sets: (probe error ψ, d_A)."""
    result = measure_a_distance(features_a, features_b, seed, formula_variant)
    return result.psi, result.d_a


def dsm_from_a_distance(d_a: float) -> float:
    return min(1.0, max(0.0, 1.0 - d_a / 2))


def dsm(
    source: Dataset,
    intervened: Dataset,
    frozen_feature_fn: FeatureFn,
    seed: int,
    formula_variant: FormulaVariant = "standard",
) -> float:
    """γ_DSM = 1 − d_A(D_s, D_{s,n}) / 2 measured on frozen features."""
    result = measure_a_distance(frozen_feature_fn(source), frozen_feature_fn(intervened), seed, formula_variant)
    return dsm_from_a_distance(result.d_a)


def select_classes(labels: np.ndarray, max_classes: int, seed: int) -> np.ndarray:
    """
    Indices of the samples whose label is in a seeded random choice of `max_classes`
    classes. Classes with a single sample cannot be split for a probe and are skipped.
    """
    classes, counts = np.unique(labels, return_counts=True)
    classes = classes[counts >= 2]
    if len(classes) > max_classes:
        rng = np.random.default_rng(seed)
        classes = rng.choice(classes, size=max_classes, replace=False)
    return np.flatnonzero(np.isin(labels, classes))


def tsm(
    intervened: Dataset,
    goal_feature_fn: FeatureFn,
    seed: int,
    max_classes: int = 4,
    test_size: float = 0.3,
    max_iter: int = 500,
) -> float:
    """
    γ_TSM = 1 − held-out error of a linear subsidiary-task probe on the features of a
    goal-pretrained backbone. At most `max_classes` subsidiary classes are kept so
    tasks with different class counts stay comparable.
    """
    if not intervened.has_subsidiary_labels:
        raise EvaluationError(f"dataset {intervened.domain_tag} has no subsidiary labels")
    labels = intervened.subsidiary_labels().numpy()
    if len(np.unique(labels)) < 2:
        raise EvaluationError(f"dataset {intervened.domain_tag} has fewer than 2 subsidiary classes")

    keep = select_classes(labels, max_classes, seed)
    if len(np.unique(labels[keep])) < 2:
        raise EvaluationError(f"dataset {intervened.domain_tag} has fewer than 2 subsidiary classes with 2+ samples")
    feats = to_numpy(goal_feature_fn(intervened))[keep]
    return 1.0 - linear_probe_error(feats, labels[keep], seed, test_size, max_iter)
