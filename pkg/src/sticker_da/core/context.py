import logging
import random
from pathlib import Path

import numpy as np
import torch

from sticker_da.training.metrics_log import MetricsLogger

from .settings import Settings

logger = logging.getLogger(__name__)


def configure_determinism(seed: int, deterministic: bool):
    """Seed every RNG in use; deterministic runs are single-threaded with deterministic kernels."""
    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)
    if deterministic:
        torch.set_num_threads(1)
        torch.use_deterministic_algorithms(True)


class RuntimeContext:
    settings: Settings
    run_dir: Path
    device: torch.device
    metrics: MetricsLogger

    def __init__(self, settings: Settings, run_dir: Path, device: torch.device, metrics: MetricsLogger):
        self.settings = settings
        self.run_dir = run_dir
        self.device = device
        self.metrics = metrics

    @classmethod
    def create(cls, settings: Settings) -> "RuntimeContext":
        run_dir = Path(settings.out_dir)
        run_dir.mkdir(parents=True, exist_ok=True)

        configure_determinism(settings.seed, settings.train.deterministic)
        use_cuda = torch.cuda.is_available() and not settings.train.deterministic
        device = torch.device("cuda" if use_cuda else "cpu")

        # Snapshot of the effective configuration, replayable with --config
        (run_dir / "config.json").write_text(settings.snapshot(), encoding="utf-8")
        logger.info(f"Run directory {run_dir} on {device}")

        return cls(settings, run_dir, device, MetricsLogger(run_dir / "metrics.jsonl"))
