"""Static PNG plots: DSM/TSM scatter and per-phase convergence curves."""

import logging
from collections import defaultdict
from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from sticker_da.training.metrics_log import MetricRecord  # noqa: E402

from .suitability import SuitabilityReport  # noqa: E402

logger = logging.getLogger(__name__)


def plot_suitability(reports: Sequence[SuitabilityReport], path: str | Path) -> Path:
    """Scatter of DSM against TSM per task, with the dsm + tsm = zeta boundary."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(5, 5))
    for report in reports:
        marker = "o" if report.passes else "x"
        ax.scatter(report.tsm, report.dsm, marker=marker, s=60)
        ax.annotate(report.task, (report.tsm, report.dsm), textcoords="offset points", xytext=(5, 5), fontsize=8)
    if reports:
        zeta = reports[0].zeta
        ax.plot([0, 1], [zeta, zeta - 1], linestyle="--", color="gray", label=f"DSM + TSM = {zeta:g}")
        ax.fill_between([0, 1], [zeta, zeta - 1], [1, 1], color="tab:green", alpha=0.1)
        ax.legend(loc="lower left")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("TSM")
    ax.set_ylabel("DSM")
    ax.set_title("Subsidiary task suitability")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.debug(f"Wrote suitability plot to {path}")
    return path


def plot_convergence(records: Sequence[MetricRecord], out_dir: str | Path) -> list[Path]:
    """One PNG per phase with every per-step loss series of that phase."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    by_phase: dict[str, dict[str, list[tuple[int, float]]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.metric.startswith("loss_"):
            by_phase[r.phase][r.metric].append((r.step, r.value))

    written = []
    for phase, series in sorted(by_phase.items()):
        fig, ax = plt.subplots(figsize=(7, 4))
        for metric, points in sorted(series.items()):
            steps, values = zip(*points, strict=True)
            ax.plot(steps, values, label=metric.removeprefix("loss_"), linewidth=1)
        ax.set_xlabel("micro-step")
        ax.set_ylabel("loss")
        ax.set_title(phase)
        ax.legend()
        fig.tight_layout()
        path = out_dir / f"convergence_{phase}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    logger.info(f"Wrote {len(written)} convergence plots to {out_dir}")
    return written
