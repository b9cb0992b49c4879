import logging
from pathlib import Path

import colorlog

from sticker_da.core import ConfigError, Settings

CONSOLE_FORMAT = "%(log_color)s[%(levelname)s]%(reset)s  %(asctime)s - %(name)s - %(message)s"
FILE_FORMAT = "%(asctime)s %(levelname)s %(name)s - %(message)s"

LEVEL_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}

# font and image-plugin discovery chatter at DEBUG
QUIET_LOGGERS = ("matplotlib", "PIL")

RUN_LOG_NAME = "run.log"


def _level(name: str) -> int:
    try:
        return logging.getLevelNamesMapping()[name.upper()]
    except KeyError:
        raise ConfigError(f"unknown log level '{name}'") from None


def setup_logging(settings: Settings, run_log: bool = True) -> Path | None:
    """
    Console logging through colorlog, plus an uncoloured `run.log` in the run directory
    that every command of the run appends to. Re-applied on each command of a process,
    replacing the handlers of the previous one. Returns the run log path, if any.
    """
    console = colorlog.StreamHandler()
    console.setFormatter(colorlog.ColoredFormatter(CONSOLE_FORMAT, datefmt="%H:%M:%S", log_colors=LEVEL_COLORS))
    handlers: list[logging.Handler] = [console]

    log_path = None
    if run_log:
        log_path = Path(settings.out_dir) / RUN_LOG_NAME
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        handlers.append(file_handler)

    root_level = _level(settings.log_level)
    logging.basicConfig(level=root_level, handlers=handlers, force=True)
    logging.getLogger("sticker_da").setLevel(_level(settings.app_log_level))
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(root_level, logging.WARNING))
    return log_path
