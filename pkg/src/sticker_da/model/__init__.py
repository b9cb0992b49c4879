from .bundle import (
    COMPONENTS,
    Component,
    ModelBundle,
    build_model,
    device_of,
    features,
    forward_all,
    forward_goal,
    forward_subsidiary,
)
from .checkpoint import (
    FORMAT_VERSION,
    PHASES,
    Checkpoint,
    Phase,
    config_fingerprint,
    load_model,
    read_checkpoint,
    save_checkpoint,
    warm_start_backbone,
)
from .networks import Backbone, GoalHead, SubsidiaryHead

__all__ = [
    "COMPONENTS",
    "FORMAT_VERSION",
    "PHASES",
    "Backbone",
    "Checkpoint",
    "Component",
    "GoalHead",
    "ModelBundle",
    "Phase",
    "SubsidiaryHead",
    "build_model",
    "config_fingerprint",
    "device_of",
    "features",
    "forward_all",
    "forward_goal",
    "forward_subsidiary",
    "load_model",
    "read_checkpoint",
    "save_checkpoint",
    "warm_start_backbone",
]
