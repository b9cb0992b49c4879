import hashlib
import logging
from collections.abc import Iterable
from typing import Literal

import torch
from torch import nn

from sticker_da.core.exceptions import ConfigError, NumericError
from sticker_da.core.settings import ModelSettings
from sticker_da.data.schemas import Batch

from .networks import Backbone, GoalHead, SubsidiaryHead

logger = logging.getLogger(__name__)

Component = Literal["h", "f_g", "f_n"]
COMPONENTS: tuple[Component, ...] = ("h", "f_g", "f_n")


class ModelBundle(nn.Module):
    """Backbone h, goal head f_g and subsidiary head f_n, with per-component freezing."""

    def __init__(self, backbone: Backbone, goal_head: GoalHead, subsidiary_head: SubsidiaryHead):
        super().__init__()
        self.backbone = backbone
        self.goal_head = goal_head
        self.subsidiary_head = subsidiary_head
        self.frozen: frozenset[Component] = frozenset()

    @property
    def goal_classes(self) -> int:
        return self.goal_head.classifier.out_features

    @property
    def sticker_classes(self) -> int:
        """|C_n|, the in-source subsidiary classes; the OOS node sits at this index."""
        return self.subsidiary_head.n_outputs - 1

    def component(self, name: Component) -> nn.Module:
        if name == "h":
            return self.backbone
        if name == "f_g":
            return self.goal_head
        if name == "f_n":
            return self.subsidiary_head
        raise ConfigError(f"unknown model component '{name}', expected one of {COMPONENTS}")

    def parameters_of(self, names: Iterable[Component]) -> list[nn.Parameter]:
        return [p for name in names for p in self.component(name).parameters()]

    def set_frozen(self, components: Iterable[Component]):
        """
        Freeze exactly `components`: their parameters stop requiring gradients and the
        modules stay in eval mode, so batch-norm statistics are not updated either.
        """
        frozen = frozenset(components)
        for name in COMPONENTS:
            module = self.component(name)
            module.requires_grad_(name not in frozen)
            if name in frozen:
                module.eval()
        self.frozen = frozen
        logger.debug(f"Frozen components: {sorted(frozen)}")

    def train(self, mode: bool = True) -> "ModelBundle":
        super().train(mode)
        for name in self.frozen:
            self.component(name).eval()
        return self

    def checksum(self, name: Component) -> str:
        """sha256 over the parameters and buffers of one component."""
        digest = hashlib.sha256()
        for key, tensor in sorted(self.component(name).state_dict().items()):
            digest.update(key.encode())
            digest.update(tensor.detach().cpu().contiguous().numpy().tobytes())
        return digest.hexdigest()

    def checksums(self) -> dict[Component, str]:
        return {name: self.checksum(name) for name in COMPONENTS}


def build_model(arch: ModelSettings, goal_classes: int, sticker_classes: int, seed: int) -> ModelBundle:
    """Build a bundle whose initial weights depend only on (`arch`, class counts, `seed`)."""
    if goal_classes < 2 or sticker_classes < 2:
        raise ConfigError(f"need at least 2 goal and sticker classes, got {goal_classes} and {sticker_classes}")
    if len(arch.channels) < 3:
        raise ConfigError("model.channels needs at least 3 blocks")

    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        backbone = Backbone(arch.channels, arch.feature_dim)
        goal_head = GoalHead(arch.feature_dim, arch.bottleneck_dim, goal_classes)
        subsidiary_head = SubsidiaryHead(backbone.tap_channels, arch.channels[-1], arch.bottleneck_dim, sticker_classes)
    return ModelBundle(backbone, goal_head, subsidiary_head)


def _unpack(batch: Batch | torch.Tensor) -> tuple[torch.Tensor, str]:
    if isinstance(batch, Batch):
        return batch.images, batch.batch_id
    return batch, "<tensor>"


def _check_finite(out: torch.Tensor, batch_id: str, what: str) -> torch.Tensor:
    if not torch.isfinite(out).all():
        raise NumericError(batch_id, f"non-finite {what}")
    return out


def device_of(m: ModelBundle) -> torch.device:
    return next(m.parameters()).device


def features(m: ModelBundle, batch: Batch | torch.Tensor) -> torch.Tensor:
    """Backbone features z = h(x), one row per sample."""
    x, batch_id = _unpack(batch)
    return _check_finite(m.backbone(x), batch_id, "backbone features")


def forward_goal(m: ModelBundle, batch: Batch | torch.Tensor) -> torch.Tensor:
    x, batch_id = _unpack(batch)
    return _check_finite(m.goal_head(m.backbone(x)), batch_id, "goal logits")


def forward_subsidiary(m: ModelBundle, batch: Batch | torch.Tensor) -> torch.Tensor:
    x, batch_id = _unpack(batch)
    tap, _ = m.backbone.forward_tap(x)
    return _check_finite(m.subsidiary_head(tap), batch_id, "subsidiary logits")


def forward_all(m: ModelBundle, batch: Batch | torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(z, goal logits, subsidiary logits) from a single backbone pass."""
    x, batch_id = _unpack(batch)
    tap, z = m.backbone.forward_tap(x)
    _check_finite(z, batch_id, "backbone features")
    goal = _check_finite(m.goal_head(z), batch_id, "goal logits")
    subsidiary = _check_finite(m.subsidiary_head(tap), batch_id, "subsidiary logits")
    return z, goal, subsidiary
