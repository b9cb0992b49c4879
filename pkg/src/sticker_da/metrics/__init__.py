from .discrepancy import ADistance, a_distance, d_a_from_error, dsm, dsm_from_a_distance, measure_a_distance, tsm
from .evaluation import FeatureDistanceReport, accuracy, extract_features, feature_a_distance_report, oos_mass, predict
from .probe import linear_probe_error
from .suitability import SUBSIDIARY_TASKS, SuitabilityReport, build_task_dataset, suitability

__all__ = [
    "ADistance",
    "FeatureDistanceReport",
    "SUBSIDIARY_TASKS",
    "SuitabilityReport",
    "a_distance",
    "accuracy",
    "build_task_dataset",
    "d_a_from_error",
    "dsm",
    "dsm_from_a_distance",
    "extract_features",
    "feature_a_distance_report",
    "linear_probe_error",
    "measure_a_distance",
    "oos_mass",
    "predict",
    "suitability",
    "tsm",
]
