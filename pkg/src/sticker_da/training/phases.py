"""
The three training phases: goal pretraining on source, sticker-head pretraining with
the OOS node, and target adaptation. Every phase trains with one Adam optimizer per
loss applied round-robin and checks by checksum that frozen components did not change.
"""

import logging
import math
from collections import defaultdict
from collections.abc import Callable, Iterator
from functools import partial

import torch

from sticker_da.core.exceptions import LabelSetMismatchError, MemoryBankError, PhaseContractError, ScheduleError
from sticker_da.core.settings import BankSpace, TrainSettings
from sticker_da.data.batching import cycle_batches, iterate_batches
from sticker_da.data.schemas import Batch, Dataset
from sticker_da.data.utils import derive_seed
from sticker_da.losses import (
    MemoryBank,
    ce_label_smoothed,
    loss_diversity,
    loss_oos,
    loss_self_training,
    loss_subsidiary,
    loss_subsidiary_target,
    mean_prediction,
)
from sticker_da.metrics.evaluation import accuracy
from sticker_da.model.bundle import Component, ModelBundle, device_of, features, forward_goal, forward_subsidiary
from sticker_da.model.checkpoint import Phase

from .metrics_log import MetricsLogger
from .round_robin import make_optimizer, round_robin_step
from .schemas import PhaseReport

logger = logging.getLogger(__name__)

# batch-norm layers cannot normalize a single training sample
MIN_TRAIN_BATCH = 2


class _PhaseLog:
    """Per-step and per-epoch bookkeeping shared by the phases."""

    def __init__(self, phase: Phase, metrics: MetricsLogger | None):
        self.phase = phase
        self.metrics = metrics
        self.step = 0
        self.epoch_values: dict[str, list[float]] = defaultdict(list)
        self.epoch_losses: dict[str, list[float]] = defaultdict(list)
        self.epoch_metrics: dict[str, list[float]] = defaultdict(list)

    def record_steps(self, applied: list[tuple[str, float]]):
        for name, value in applied:
            self.step += 1
            self.epoch_values[name].append(value)
            if self.metrics is not None:
                self.metrics.log(self.step, self.phase, f"loss_{name}", value)

    def close_epoch(self, epoch: int, **evaluations: float):
        for name, values in self.epoch_values.items():
            mean = sum(values) / len(values)
            self.epoch_losses[name].append(mean)
            if self.metrics is not None:
                self.metrics.log(self.step, self.phase, f"epoch_loss_{name}", mean)
        for name, value in evaluations.items():
            self.epoch_metrics[name].append(value)
            if self.metrics is not None:
                self.metrics.log(self.step, self.phase, name, value)
        summary = ", ".join(f"{k}={v[-1]:.4f}" for k, v in {**self.epoch_losses, **self.epoch_metrics}.items())
        logger.info(f"[{self.phase}] epoch {epoch + 1}: {summary}")
        self.epoch_values.clear()


def _finish(
    m: ModelBundle,
    log: _PhaseLog,
    epochs: int,
    trained: tuple[Component, ...],
    before: dict[Component, str],
) -> PhaseReport:
    after = m.checksums()
    changed = [name for name in m.frozen if after[name] != before[name]]
    if changed:
        raise PhaseContractError(f"{log.phase}: frozen components changed: {changed}")
    untouched = [name for name in trained if after[name] == before[name]]
    if untouched:
        raise PhaseContractError(f"{log.phase}: trained components did not change: {untouched}")
    return PhaseReport(
        phase=log.phase,
        epochs=epochs,
        steps=log.step,
        epoch_losses=dict(log.epoch_losses),
        epoch_metrics=dict(log.epoch_metrics),
        trained=list(trained),
        checksums_before=dict(before),
        checksums_after=dict(after),
    )


def _usable(batch: Batch) -> bool:
    return len(batch) >= MIN_TRAIN_BATCH


def _goal_loss(m: ModelBundle, batch: Batch, smoothing: float) -> torch.Tensor:
    return ce_label_smoothed(forward_goal(m, batch), batch.goal_labels, smoothing)


def pretrain_goal(
    m: ModelBundle,
    source: Dataset,
    stickered_source: Dataset | None,
    cfg: TrainSettings,
    seed: int,
    metrics: MetricsLogger | None = None,
) -> PhaseReport:
    """Train h and f_g with label-smoothed cross-entropy on D_s ∪ D_{s,n}; f_n stays frozen."""
    train_set = source
    if stickered_source is not None:
        if stickered_source.goal_classes != source.goal_classes or not stickered_source.has_goal_labels:
            raise LabelSetMismatchError("stickered source must carry the goal labels of the source set")
        train_set = source.union(stickered_source, domain_tag="goal-train")
    if not train_set.has_goal_labels:
        raise LabelSetMismatchError(f"dataset {source.domain_tag} has unlabeled samples")
    if train_set.goal_classes != m.goal_classes:
        raise LabelSetMismatchError(f"model has {m.goal_classes} goal classes, data has {train_set.goal_classes}")

    trained: tuple[Component, ...] = ("h", "f_g")
    m.set_frozen({"f_n"})
    m.train()
    before = m.checksums()
    device = device_of(m)
    optimizers = {"goal": make_optimizer(m.parameters_of(trained), cfg.lr, (cfg.beta1, cfg.beta2))}
    log = _PhaseLog("source_goal", metrics)

    for epoch in range(cfg.epochs_goal):
        for batch in iterate_batches(train_set, cfg.batch_size, seed=derive_seed(seed, "goal", epoch)):
            if not _usable(batch):
                continue
            batch = batch.to(device)
            losses = {"goal": partial(_goal_loss, m, batch, cfg.label_smoothing)}
            log.record_steps(round_robin_step(optimizers, losses, ["goal"]))
        log.close_epoch(epoch, source_acc=accuracy(m, source))

    return _finish(m, log, cfg.epochs_goal, trained, before)


def _sticker_loss(m: ModelBundle, batch: Batch, oos_batch: Batch | None) -> torch.Tensor | None:
    if not _usable(batch):
        return None
    if oos_batch is None:
        return loss_subsidiary(forward_subsidiary(m, batch), batch.subsidiary_labels)
    logits, _ = _joint_subsidiary_logits(m, batch, oos_batch)
    return loss_subsidiary(logits, batch.subsidiary_labels)


def _oos_loss(m: ModelBundle, batch: Batch, oos_batch: Batch) -> torch.Tensor | None:
    if not _usable(oos_batch):
        return None
    _, logits = _joint_subsidiary_logits(m, batch, oos_batch)
    return loss_oos(logits, oos_batch.subsidiary_labels)


def _joint_subsidiary_logits(m: ModelBundle, batch: Batch, oos_batch: Batch) -> tuple[torch.Tensor, torch.Tensor]:
    """One f_n pass over stickered and pseudo-OOS samples together, split back into the two slices."""
    logits = forward_subsidiary(m, torch.cat([batch.images, oos_batch.images]))
    return logits[: len(batch)], logits[len(batch) :]


def _next_on(stream: Iterator[Batch], device: torch.device) -> Batch:
    return next(stream).to(device)


def pretrain_sticker(
    m: ModelBundle,
    stickered_source: Dataset,
    pseudo_oos: Dataset | None,
    cfg: TrainSettings,
    seed: int,
    metrics: MetricsLogger | None = None,
) -> PhaseReport:
    """
    Train only f_n, with h and f_g frozen: one optimizer for the sticker loss on D_{s,n}
    and one for the OOS loss on D_s^(od), stepped alternately.

    Both losses read the same forward pass over a stickered batch joined with a pseudo-OOS
    batch of `cfg.oos_batch_fraction` its size, so the head's batch norms always see
    both populations.
    """
    if not stickered_source.has_subsidiary_labels:
        raise LabelSetMismatchError(f"dataset {stickered_source.domain_tag} has no sticker labels")
    if stickered_source.subsidiary_classes != m.sticker_classes:
        raise LabelSetMismatchError(
            f"model has {m.sticker_classes} sticker classes, data has {stickered_source.subsidiary_classes}"
        )
    if pseudo_oos is not None and pseudo_oos.subsidiary_classes != m.sticker_classes:
        raise LabelSetMismatchError(f"pseudo-OOS labels must use the OOS index {m.sticker_classes}")

    trained: tuple[Component, ...] = ("f_n",)
    m.set_frozen({"h", "f_g"})
    m.train()
    before = m.checksums()
    device = device_of(m)
    betas = (cfg.beta1, cfg.beta2)
    params = m.parameters_of(trained)
    optimizers = {"subsidiary": make_optimizer(params, cfg.lr, betas)}
    schedule = ["subsidiary"]
    oos_stream = None
    if pseudo_oos is not None:
        optimizers["oos"] = make_optimizer(params, cfg.lr, betas)
        schedule.append("oos")
        oos_batch_size = max(MIN_TRAIN_BATCH, round(cfg.batch_size * cfg.oos_batch_fraction))
        oos_stream = cycle_batches(pseudo_oos, oos_batch_size, seed=derive_seed(seed, "oos-stream"))

    sticker_stream = cycle_batches(stickered_source, cfg.batch_size, seed=derive_seed(seed, "sticker-stream"))
    steps_per_epoch = math.ceil(len(stickered_source) / cfg.batch_size)
    log = _PhaseLog("source_sticker", metrics)

    for epoch in range(cfg.epochs_sticker):
        for _ in range(steps_per_epoch):
            batch = _next_on(sticker_stream, device)
            oos_batch = _next_on(oos_stream, device) if oos_stream is not None else None
            losses: dict[str, Callable[[], torch.Tensor | None]] = {
                "subsidiary": partial(_sticker_loss, m, batch, oos_batch)
            }
            if oos_batch is not None:
                losses["oos"] = partial(_oos_loss, m, batch, oos_batch)
            log.record_steps(round_robin_step(optimizers, losses, schedule))
        log.close_epoch(epoch, sticker_acc=accuracy(m, stickered_source, head="subsidiary"))

    return _finish(m, log, cfg.epochs_sticker, trained, before)


def bank_features(m: ModelBundle, batch: Batch | torch.Tensor, space: BankSpace) -> torch.Tensor:
    """Features stored in the memory bank: backbone features or goal logits."""
    if space == "goal_logits":
        return forward_goal(m, batch)
    return features(m, batch)


@torch.no_grad()
def _eval_forward(m: ModelBundle, batch: Batch, space: BankSpace) -> torch.Tensor:
    was_training = m.training
    m.eval()
    try:
        return bank_features(m, batch, space)
    finally:
        m.train(was_training)


def initialize_bank(m: ModelBundle, ds: Dataset, temperature: float, space: BankSpace = "backbone") -> MemoryBank:
    """One eval-mode pass over `ds` filling every bank row."""
    device = device_of(m)
    bank: MemoryBank | None = None
    for batch in iterate_batches(ds, 256, seed=0, shuffle=False):
        feats = _eval_forward(m, batch.to(device), space)
        if bank is None:
            bank = MemoryBank(ds.ids, feats.shape[1], temperature, device=device)
        bank.update(feats, batch.ids)
    if bank is None:
        raise MemoryBankError(f"cannot build a memory bank over the empty dataset {ds.domain_tag}")
    logger.info(f"Initialized memory bank: {len(bank)} rows × {bank.dim} ({space})")
    return bank


def _target_sticker_loss(m: ModelBundle, batch: Batch) -> torch.Tensor | None:
    if not _usable(batch):
        return None
    return loss_subsidiary_target(forward_subsidiary(m, batch), batch.subsidiary_labels)


def _self_training_loss(m: ModelBundle, bank: MemoryBank, batch: Batch, space: BankSpace) -> torch.Tensor | None:
    if not _usable(batch):
        return None
    return loss_self_training(bank, bank_features(m, batch, space), batch.ids)


def _diversity_loss(m: ModelBundle, batch: Batch) -> torch.Tensor | None:
    if not _usable(batch):
        return None
    return loss_diversity(mean_prediction(forward_goal(m, batch)), m.goal_classes)


def adapt_target(
    m: ModelBundle,
    target: Dataset,
    stickered_target: Dataset | None,
    cfg: TrainSettings,
    seed: int,
    metrics: MetricsLogger | None = None,
    bank: MemoryBank | None = None,
) -> PhaseReport:
    """
    Adapt to the target with f_g frozen. L_st and L_div train h over D_t ∪ D_{t,n};
    the target sticker loss L_{t,n} trains h and f_n. Target goal labels, when present,
    are only used for the logged accuracy.

    Without `stickered_target` (or with `use_subsidiary` off) this is the adaptation
    baseline: L_st and L_div over D_t alone. `bank` defaults to a fresh bank initialized
    over the joint set; a supplied bank must already be initialized.
    """
    use_subsidiary = cfg.use_subsidiary and stickered_target is not None
    joint = target.union(stickered_target, domain_tag="adapt-joint") if use_subsidiary else target
    if use_subsidiary and stickered_target.subsidiary_classes != m.sticker_classes:
        raise LabelSetMismatchError(
            f"model has {m.sticker_classes} sticker classes, data has {stickered_target.subsidiary_classes}"
        )

    enabled = {
        "subsidiary": use_subsidiary,
        "self_training": cfg.use_self_training,
        "diversity": cfg.use_diversity,
    }
    schedule = [name for name in cfg.schedule if enabled[name]]
    if not schedule:
        raise ScheduleError("every adaptation loss is disabled")

    m.set_frozen({"f_g"})
    if bank is None:
        bank = initialize_bank(m, joint, cfg.temperature, cfg.bank_space)
    elif not bank.initialized:
        raise MemoryBankError("adaptation needs an initialized memory bank")

    m.train()
    before = m.checksums()
    device = device_of(m)
    betas = (cfg.beta1, cfg.beta2)
    optimizers = {}
    if enabled["subsidiary"]:
        optimizers["subsidiary"] = make_optimizer(m.parameters_of(("h", "f_n")), cfg.lr, betas)
    if enabled["self_training"]:
        optimizers["self_training"] = make_optimizer(m.parameters_of(("h",)), cfg.lr, betas)
    if enabled["diversity"]:
        optimizers["diversity"] = make_optimizer(m.parameters_of(("h",)), cfg.lr, betas)
    trained: tuple[Component, ...] = ("h", "f_n") if use_subsidiary else ("h",)

    sticker_stream = None
    if use_subsidiary:
        sticker_stream = cycle_batches(stickered_target, cfg.batch_size, seed=derive_seed(seed, "target-sticker"))
    log = _PhaseLog("adapted", metrics)

    for epoch in range(cfg.epochs_adapt):
        for batch in iterate_batches(joint, cfg.batch_size, seed=derive_seed(seed, "adapt", epoch)):
            batch = batch.to(device)
            losses: dict[str, Callable[[], torch.Tensor | None]] = {
                "self_training": partial(_self_training_loss, m, bank, batch, cfg.bank_space),
                "diversity": partial(_diversity_loss, m, batch),
            }
            if sticker_stream is not None:
                losses["subsidiary"] = partial(_target_sticker_loss, m, _next_on(sticker_stream, device))
            log.record_steps(round_robin_step(optimizers, losses, schedule))
            bank.update(_eval_forward(m, batch, cfg.bank_space), batch.ids)

        evaluations = {"target_acc": accuracy(m, target)} if target.has_goal_labels else {}
        log.close_epoch(epoch, **evaluations)

    return _finish(m, log, cfg.epochs_adapt, trained, before)
