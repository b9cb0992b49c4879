from .adaptation import loss_diversity, loss_self_training, mean_prediction, neighbor_logits, neighbor_probs
from .classification import ce_label_smoothed, loss_oos, loss_subsidiary, loss_subsidiary_target
from .memory_bank import MemoryBank, update_bank

__all__ = [
    "MemoryBank",
    "ce_label_smoothed",
    "loss_diversity",
    "loss_oos",
    "loss_self_training",
    "loss_subsidiary",
    "loss_subsidiary_target",
    "mean_prediction",
    "neighbor_logits",
    "neighbor_probs",
    "update_bank",
]
