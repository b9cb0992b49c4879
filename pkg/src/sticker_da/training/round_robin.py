from collections.abc import Callable, Mapping, Sequence

import torch

from sticker_da.core.exceptions import ScheduleError


def make_optimizer(params: list[torch.nn.Parameter], lr: float, betas: tuple[float, float]) -> torch.optim.Adam:
    return torch.optim.Adam(params, lr=lr, betas=betas)


def round_robin_step(
    optimizers: Mapping[str, torch.optim.Optimizer],
    losses: Mapping[str, Callable[[], torch.Tensor | None]],
    schedule: Sequence[str],
) -> list[tuple[str, float]]:
    """
    Apply the losses of `schedule` one at a time, each with its own optimizer.

    Before every micro-step all gradients of all optimizers are reset to None, so a
    step on one loss never sees another loss's gradients and other optimizers' Adam
    moments stay untouched. A loss closure returning None (e.g. an unusable batch) skips
    its micro-step. Returns the (loss name, value) pairs applied, in order.
    """
    unknown = [name for name in schedule if name not in optimizers or name not in losses]
    if unknown:
        raise ScheduleError(f"schedule names losses without an optimizer or closure: {unknown}")

    applied: list[tuple[str, float]] = []
    for name in schedule:
        for optimizer in optimizers.values():
            optimizer.zero_grad(set_to_none=True)
        loss = losses[name]()
        if loss is None:
            continue
        loss.backward()
        optimizers[name].step()
        applied.append((name, loss.item()))

    for optimizer in optimizers.values():
        optimizer.zero_grad(set_to_none=True)
    return applied
