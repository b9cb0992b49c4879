from .metrics_log import MetricRecord, MetricsLogger, read_metrics
from .phases import adapt_target, bank_features, initialize_bank, pretrain_goal, pretrain_sticker
from .round_robin import make_optimizer, round_robin_step
from .schemas import PhaseReport

__all__ = [
    "MetricRecord",
    "MetricsLogger",
    "PhaseReport",
    "adapt_target",
    "bank_features",
    "initialize_bank",
    "make_optimizer",
    "pretrain_goal",
    "pretrain_sticker",
    "read_metrics",
    "round_robin_step",
]
