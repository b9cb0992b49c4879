import logging
import warnings

import numpy as np
import torch
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression
from sklearn.model_selection import train_test_split
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from sticker_da.core.exceptions import EvaluationError

logger = logging.getLogger(__name__)


def to_numpy(values: torch.Tensor | np.ndarray) -> np.ndarray:
    if isinstance(values, torch.Tensor):
        return values.detach().cpu().numpy()
    return np.asarray(values)


def linear_probe_error(
    features: torch.Tensor | np.ndarray,
    labels: torch.Tensor | np.ndarray,
    seed: int,
    test_size: float = 0.3,
    max_iter: int = 500,
) -> float:
    """
    Held-out error of a logistic-regression probe trained on frozen `features`.
    The split is stratified and fixed by `seed`.
    """
    X = to_numpy(features).reshape(len(features), -1).astype(np.float64)
    y = to_numpy(labels).astype(np.int64)
    if len(np.unique(y)) < 2:
        raise EvaluationError("a linear probe needs at least 2 classes")

    try:
        X_train, X_test, y_train, y_test = train_test_split(X, y, test_size=test_size, random_state=seed, stratify=y)
    except ValueError as e:
        raise EvaluationError(f"cannot split {len(y)} samples for a probe: {e}") from e
    clf = make_pipeline(StandardScaler(), LogisticRegression(max_iter=max_iter, random_state=seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        clf.fit(X_train, y_train)
    return float(np.mean(clf.predict(X_test) != y_test))
