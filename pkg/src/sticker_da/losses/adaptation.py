"""Unsupervised target objectives: neighbourhood self-training over the memory bank and diversity."""

import math
from collections.abc import Sequence

import torch
import torch.nn.functional as F

from sticker_da.core.exceptions import LossInputError, MemoryBankError

from .memory_bank import MemoryBank

# finite stand-in for -inf on the self entry, keeps p·log p at exactly 0 there
_SELF_LOGIT = -1e9


def neighbor_logits(bank: MemoryBank, features: torch.Tensor, ids: Sequence[str]) -> torch.Tensor:
    """B×N similarities F_j·f_i / T with each sample's own row masked out."""
    if len(bank) < 2:
        raise MemoryBankError(f"a memory bank needs at least 2 rows to have neighbours, has {len(bank)}")
    sims = features @ bank.features.to(features.dtype).T / bank.temperature
    self_mask = torch.zeros_like(sims, dtype=torch.bool)
    self_mask[torch.arange(len(ids)), bank.rows(ids).to(sims.device)] = True
    return sims.masked_fill(self_mask, _SELF_LOGIT)


def neighbor_probs(bank: MemoryBank, f_i: torch.Tensor, self_id: str) -> torch.Tensor:
    """
    p_{i,j} = softmax_j(F_j·f_i / T) over j ≠ self_id, as a length-N vector indexed by
    bank row whose self entry is exactly 0.
    """
    if f_i.dim() != 1:
        raise LossInputError(f"expected a single feature vector, got shape {tuple(f_i.shape)}")
    norm = f_i.norm().item()
    if abs(norm - 1.0) > 1e-4:
        raise LossInputError(f"query feature must be L2-normalized, has norm {norm:.6f}")
    return F.softmax(neighbor_logits(bank, f_i[None], [self_id]), dim=-1)[0]


def loss_self_training(bank: MemoryBank, batch_features: torch.Tensor, batch_ids: Sequence[str]) -> torch.Tensor:
    """L_st: mean entropy of the neighbour distributions of the batch (features normalized here)."""
    logits = neighbor_logits(bank, F.normalize(batch_features, dim=1), batch_ids)
    log_p = F.log_softmax(logits, dim=-1)
    entropy = -(log_p.exp() * log_p).sum(-1)
    return entropy.mean()


def mean_prediction(logits: torch.Tensor) -> torch.Tensor:
    """p̂: batch mean of the softmax predictions."""
    return F.softmax(logits, dim=-1).mean(0)


def loss_diversity(p_hat: torch.Tensor, n_classes: int) -> torch.Tensor:
    """L_div = KL(p̂ ‖ uniform) − log K, which equals −H(p̂)."""
    if p_hat.shape != (n_classes,):
        raise LossInputError(f"p_hat must have shape ({n_classes},), got {tuple(p_hat.shape)}")
    total = p_hat.sum().item()
    if abs(total - 1.0) > 1e-4 or bool((p_hat < 0).any()):
        raise LossInputError(f"p_hat is not a probability vector (sum {total:.6f})")
    kl = (torch.xlogy(p_hat, p_hat) - p_hat * math.log(1.0 / n_classes)).sum()
    return kl - math.log(n_classes)
