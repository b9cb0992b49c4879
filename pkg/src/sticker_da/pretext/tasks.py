"""
Whole-image pretext tasks used as comparison points for suitability:
image rotation, patch location and jigsaw. Each builds a Dataset whose subsidiary
labels index the transformation applied to the image.
"""

import logging
from collections.abc import Callable
from functools import lru_cache

import torch
import torch.nn.functional as F

from sticker_da.core.exceptions import ConfigError
from sticker_da.core.settings import PRETEXT_TASKS, PretextTask
from sticker_da.data.schemas import Dataset, Sample
from sticker_da.data.utils import derive_seed, stable_sample_id
from sticker_da.oos.shuffle import patch_permutation, rearrange_patches

logger = logging.getLogger(__name__)

N_PRETEXT_CLASSES = 4
JIGSAW_GRID = 3
JIGSAW_SEED = 1234


def rotate_image(x: torch.Tensor, k: int) -> torch.Tensor:
    """Rotate a C×H×W image counter-clockwise by k·90°; non-square images are resized back to H×W."""
    _, height, width = x.shape
    rotated = torch.rot90(x, k=k, dims=(1, 2))
    if rotated.shape[1:] != (height, width):
        rotated = F.interpolate(rotated[None], size=(height, width), mode="bilinear", align_corners=False)[0]
    return rotated


def crop_quadrant(x: torch.Tensor, quadrant: int) -> torch.Tensor:
    """Crop quadrant 0 top-left, 1 top-right, 2 bottom-left or 3 bottom-right and resize it to full size."""
    _, height, width = x.shape
    hh, hw = height // 2, width // 2
    row, col = divmod(quadrant, 2)
    crop = x[:, row * hh : (row + 1) * hh, col * hw : (col + 1) * hw]
    return F.interpolate(crop[None], size=(height, width), mode="bilinear", align_corners=False)[0].clamp(0, 1)


@lru_cache
def jigsaw_permutations(n: int = N_PRETEXT_CLASSES, grid: int = JIGSAW_GRID, seed: int = JIGSAW_SEED) -> torch.Tensor:
    """`n` distinct non-identity patch permutations, fixed by `seed`."""
    identity = torch.arange(grid * grid)
    found: list[torch.Tensor] = []
    attempt = 0
    while len(found) < n:
        perm = patch_permutation(grid, derive_seed(seed, attempt))
        attempt += 1
        if torch.equal(perm, identity) or any(torch.equal(perm, p) for p in found):
            continue
        found.append(perm)
    return torch.stack(found)


def apply_jigsaw(x: torch.Tensor, label: int) -> torch.Tensor:
    return rearrange_patches(x, JIGSAW_GRID, jigsaw_permutations()[label])


_TRANSFORMS: dict[PretextTask, Callable[[torch.Tensor, int], torch.Tensor]] = {
    "image-rotation": rotate_image,
    "patch-location": crop_quadrant,
    "jigsaw": apply_jigsaw,
}


def build_pretext_dataset(ds: Dataset, task: PretextTask, seed: int) -> Dataset:
    """One transformed copy per sample with a uniformly drawn pretext label; goal labels are kept."""
    if task not in PRETEXT_TASKS:
        raise ConfigError(f"unknown pretext task '{task}', expected one of {PRETEXT_TASKS}")
    transform = _TRANSFORMS[task]
    domain_tag = f"{ds.domain_tag}-{task}"

    samples = []
    for sample in ds:
        generator = torch.Generator().manual_seed(derive_seed(seed, sample.id, task))
        label = int(torch.randint(N_PRETEXT_CLASSES, (1,), generator=generator))
        samples.append(
            Sample(
                id=stable_sample_id(domain_tag, sample.id),
                image=transform(sample.image, label),
                goal_label=sample.goal_label,
                subsidiary_label=label,
            )
        )

    logger.info(f"Built {len(samples)} {task} samples from {ds.domain_tag}")
    return ds.with_samples(samples, subsidiary_classes=N_PRETEXT_CLASSES, domain_tag=domain_tag)
