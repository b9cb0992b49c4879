from collections.abc import Iterator

import torch

from .schemas import Batch, Dataset, Sample, _labels


def collate(samples: list[Sample], batch_id: str) -> Batch:
    return Batch(
        batch_id=batch_id,
        ids=[s.id for s in samples],
        images=torch.stack([s.image for s in samples]),
        goal_labels=_labels([s.goal_label for s in samples]),
        subsidiary_labels=_labels([s.subsidiary_label for s in samples]),
        is_oos=torch.tensor([s.is_oos for s in samples], dtype=torch.bool),
    )


def iterate_batches(ds: Dataset, batch_size: int, seed: int, shuffle: bool = True) -> Iterator[Batch]:
    """
    Yield one epoch of `ds` in batches. The order is a permutation drawn from `seed`
    (identity when `shuffle` is off); the final short batch is included.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")

    if shuffle:
        generator = torch.Generator().manual_seed(seed)
        order = torch.randperm(len(ds), generator=generator).tolist()
    else:
        order = list(range(len(ds)))

    for index, start in enumerate(range(0, len(order), batch_size)):
        chunk = [ds[i] for i in order[start : start + batch_size]]
        yield collate(chunk, batch_id=f"{ds.domain_tag}:{seed}:{index}")


def cycle_batches(ds: Dataset, batch_size: int, seed: int) -> Iterator[Batch]:
    """Endless stream of epochs, each reshuffled with a seed derived from `seed` and the epoch number."""
    if len(ds) == 0:
        raise ValueError(f"cannot cycle over the empty dataset {ds.domain_tag}")
    epoch = 0
    while True:
        yield from iterate_batches(ds, batch_size, seed=seed + epoch)
        epoch += 1
