from .run import COMMANDS, bootstrap, run

__all__ = ["COMMANDS", "bootstrap", "run"]
