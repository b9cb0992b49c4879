import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from sticker_da.core import ConfigError, StickerDAError, load_settings
from sticker_da.core.settings import STICKER_TASKS, parse_override
from sticker_da.metrics import SUBSIDIARY_TASKS
from sticker_da.services import DataService, EvaluationService, TrainingService

from .dependencies import build_container
from .logging import setup_logging
from .simple_di import DiContainer

logger = logging.getLogger(__name__)

COMMANDS = (
    "make-data",
    "prepare-stickers",
    "make-oos",
    "pretrain-goal",
    "pretrain-sticker",
    "adapt",
    "eval",
    "suitability",
    "plot-convergence",
)


def _execute(command: str, container: DiContainer, task: str | None) -> BaseModel | list[str]:
    match command:
        case "make-data":
            return container.resolve(DataService).make_data()
        case "prepare-stickers":
            return container.resolve(DataService).prepare_stickers()
        case "make-oos":
            return container.resolve(DataService).make_oos()
        case "pretrain-goal":
            return container.resolve(TrainingService).pretrain_goal()
        case "pretrain-sticker":
            return container.resolve(TrainingService).pretrain_sticker()
        case "adapt":
            return container.resolve(TrainingService).adapt()
        case "eval":
            return container.resolve(EvaluationService).evaluate()
        case "suitability":
            return container.resolve(EvaluationService).suitability(task)
        case _:
            return container.resolve(EvaluationService).plot_convergence()


def run(
    command: str,
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
    task: str | None = None,
) -> int:
    """
    Execute one pipeline command and return its exit status: 0 on success, 1 on a
    pipeline error, 2 for an unknown command.

    `task` selects the sticker task of data and training commands; for `suitability`
    it names the task to score (any subsidiary task, or "all") and leaves the trained
    sticker task untouched.
    """
    if command not in COMMANDS:
        logger.error(f"Unknown command '{command}', expected one of {', '.join(COMMANDS)}")
        return 2

    try:
        overrides = dict(overrides or {})
        if task is not None and command != "suitability":
            if task not in STICKER_TASKS:
                raise ConfigError(f"--task {task} is only valid for suitability; training uses {STICKER_TASKS}")
            overrides["sticker.task"] = task

        settings = load_settings(config_path, overrides)
        setup_logging(settings)
        result = _execute(command, build_container(settings), task)
    except StickerDAError as e:
        logger.error(f"{command} failed: {e}")
        return 1

    if isinstance(result, BaseModel):
        print(result.model_dump_json(indent=2))
    else:
        print("\n".join(result))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sticker-da",
        description="Source-free domain adaptation with a sticker subsidiary task",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, default=None, help="TOML config or a config.json snapshot")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", type=Path, default=None, help="Run directory")
    parser.add_argument("--no-subsidiary", action="store_true", help="Adaptation baseline without the sticker task")
    parser.add_argument("--no-oos", action="store_true", help="Train without the OOS node")
    parser.add_argument("--no-st", action="store_true", help="Disable the self-training loss")
    parser.add_argument("--no-div", action="store_true", help="Disable the diversity loss")
    parser.add_argument("--task", choices=[*SUBSIDIARY_TASKS, "all"], default=None)
    parser.add_argument("--formula-variant", choices=["standard", "paper_verbatim"], default=None)
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Dotted config override, e.g. train.epochs_adapt=5 (repeatable)",
    )
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    overrides = dict(parse_override(raw) for raw in args.overrides)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = str(args.out)
    if args.formula_variant is not None:
        overrides["metrics.formula_variant"] = args.formula_variant
    toggles = {
        "no_subsidiary": "train.use_subsidiary",
        "no_oos": "train.use_oos",
        "no_st": "train.use_self_training",
        "no_div": "train.use_diversity",
    }
    for flag, key in toggles.items():
        if getattr(args, flag):
            overrides[key] = False
    return overrides


def bootstrap(argv: Sequence[str] | None = None):
    """Main entry point of the `sticker-da` command."""
    args = build_parser().parse_args(argv)
    try:
        overrides = overrides_from_args(args)
    except ConfigError as e:
        logger.error(str(e))
        sys.exit(1)
    sys.exit(run(args.command, args.config, overrides, args.task))


if __name__ == "__main__":
    bootstrap()
