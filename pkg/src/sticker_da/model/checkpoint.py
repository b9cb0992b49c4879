import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import torch

from sticker_da.core.exceptions import CheckpointMismatchError
from sticker_da.core.settings import ModelSettings

from .bundle import ModelBundle, build_model

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

Phase = Literal["source_goal", "source_sticker", "adapted"]
PHASES: tuple[Phase, ...] = ("source_goal", "source_sticker", "adapted")


def config_fingerprint(arch: ModelSettings, goal_classes: int, sticker_classes: int) -> str:
    """sha256 of everything that determines parameter shapes."""
    payload = {
        "arch": arch.model_dump(mode="json", exclude={"warm_start"}),
        "goal_classes": goal_classes,
        "sticker_classes": sticker_classes,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass(frozen=True)
class Checkpoint:
    phase: Phase
    fingerprint: str
    goal_classes: int
    sticker_classes: int
    state_dict: dict[str, torch.Tensor]
    extra: dict[str, Any]


def save_checkpoint(
    path: str | Path,
    m: ModelBundle,
    phase: Phase,
    fingerprint: str,
    extra: dict[str, Any] | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "format_version": FORMAT_VERSION,
            "phase": phase,
            "fingerprint": fingerprint,
            "goal_classes": m.goal_classes,
            "sticker_classes": m.sticker_classes,
            "state_dict": {k: v.detach().cpu() for k, v in m.state_dict().items()},
            "extra": extra or {},
        },
        path,
    )
    logger.info(f"Saved {phase} checkpoint to {path}")
    return path


def read_checkpoint(path: str | Path, expected_fingerprint: str | None = None) -> Checkpoint:
    """Read a checkpoint, failing loudly on a format-version or fingerprint mismatch."""
    raw = torch.load(Path(path), map_location="cpu", weights_only=True)
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointMismatchError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    if expected_fingerprint is not None and raw["fingerprint"] != expected_fingerprint:
        raise CheckpointMismatchError(
            f"{path}: config fingerprint {raw['fingerprint'][:12]} does not match {expected_fingerprint[:12]}"
        )
    return Checkpoint(
        phase=raw["phase"],
        fingerprint=raw["fingerprint"],
        goal_classes=raw["goal_classes"],
        sticker_classes=raw["sticker_classes"],
        state_dict=raw["state_dict"],
        extra=raw["extra"],
    )


def load_model(
    path: str | Path,
    arch: ModelSettings,
    expected_fingerprint: str | None = None,
) -> tuple[ModelBundle, Checkpoint]:
    checkpoint = read_checkpoint(path, expected_fingerprint)
    m = build_model(arch, checkpoint.goal_classes, checkpoint.sticker_classes, seed=0)
    m.load_state_dict(checkpoint.state_dict)
    m.eval()
    logger.debug(f"Loaded {checkpoint.phase} checkpoint from {path}")
    return m, checkpoint


def warm_start_backbone(m: ModelBundle, path: str | Path):
    """Initialise h from the backbone weights of another checkpoint (shapes must agree)."""
    state = read_checkpoint(path).state_dict
    prefix = "backbone."
    backbone_state = {k.removeprefix(prefix): v for k, v in state.items() if k.startswith(prefix)}
    try:
        m.backbone.load_state_dict(backbone_state)
    except RuntimeError as e:
        raise CheckpointMismatchError(f"{path}: backbone weights do not fit model.channels: {e}") from e
    logger.info(f"Warm-started backbone from {path}")
