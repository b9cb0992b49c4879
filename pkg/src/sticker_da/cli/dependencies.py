from sticker_da.core import Settings
from sticker_da.core.context import RuntimeContext
from sticker_da.services import DataService, EvaluationService, TrainingService

from .simple_di import DiContainer


def build_container(settings: Settings) -> DiContainer:
    """A container for one command invocation, seeded with its effective settings."""
    container = DiContainer()
    container.register(Settings, instance=settings)
    container.register(RuntimeContext, build=RuntimeContext.create, deps=[Settings])

    # services share the command's runtime context
    container.register(DataService, deps=[RuntimeContext])
    container.register(TrainingService, deps=[RuntimeContext])
    container.register(EvaluationService, deps=[RuntimeContext, TrainingService])
    return container
