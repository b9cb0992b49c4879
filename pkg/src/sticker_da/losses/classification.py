"""Cross-entropy objectives for the goal head and the subsidiary (sticker + OOS) head."""

import torch
import torch.nn.functional as F

from sticker_da.core.exceptions import LossInputError


def _check_labels(labels: torch.Tensor, n_classes: int, what: str):
    if labels.numel() and (labels.min() < 0 or labels.max() >= n_classes):
        raise LossInputError(f"{what} labels must lie in [0, {n_classes}), got range [{labels.min()}, {labels.max()}]")


def ce_label_smoothed(logits: torch.Tensor, labels: torch.Tensor, smoothing: float = 0.1) -> torch.Tensor:
    """
    Mean cross-entropy against the smoothed target: 1 − s on the true class and
    s / (K − 1) on each other class.
    """
    if not 0.0 <= smoothing < 1.0:
        raise LossInputError(f"smoothing must be in [0, 1), got {smoothing}")
    n_classes = logits.shape[-1]
    if n_classes < 2:
        raise LossInputError(f"need at least 2 classes, got {n_classes}")
    _check_labels(labels, n_classes, "goal")

    target = torch.full_like(logits, smoothing / (n_classes - 1))
    target.scatter_(-1, labels.unsqueeze(-1), 1.0 - smoothing)
    return -(target * F.log_softmax(logits, dim=-1)).sum(-1).mean()


def loss_subsidiary(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """L_{s,n}: cross-entropy over all |C_n| + 1 subsidiary outputs, OOS node included."""
    _check_labels(labels, logits.shape[-1], "subsidiary")
    return F.cross_entropy(logits, labels)


def loss_oos(logits: torch.Tensor, labels: torch.Tensor | None = None) -> torch.Tensor:
    """L_s^(od): cross-entropy towards the OOS node, the last subsidiary output."""
    oos_index = logits.shape[-1] - 1
    if labels is not None and labels.numel() and bool((labels != oos_index).any()):
        raise LossInputError(f"pseudo-OOS labels must all equal the OOS index {oos_index}")
    target = torch.full((logits.shape[0],), oos_index, dtype=torch.long, device=logits.device)
    return F.cross_entropy(logits, target)


def loss_subsidiary_target(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """
    L_{t,n}: cross-entropy of stickered-target samples over the full softmax. Target
    labels never name the OOS node; it only competes in the normalizer.
    """
    _check_labels(labels, logits.shape[-1] - 1, "target sticker")
    return F.cross_entropy(logits, labels)
