from .artifacts import ArtifactStore
from .data_service import DataService
from .evaluation_service import EvaluationService
from .schemas import DataResult, DatasetSummary, EvalResult, PhaseResult, SuitabilityResult
from .training_service import TrainingService

__all__ = [
    "ArtifactStore",
    "DataResult",
    "DataService",
    "DatasetSummary",
    "EvalResult",
    "EvaluationService",
    "PhaseResult",
    "SuitabilityResult",
    "TrainingService",
]
