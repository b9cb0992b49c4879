import logging

import torch

from sticker_da.core.exceptions import ConfigError
from sticker_da.core.settings import STICKER_TASKS, LocationMode, StickerTask
from sticker_da.data.schemas import Dataset, Sample
from sticker_da.data.utils import derive_seed, stable_sample_id

from .glyphs import GlyphSet
from .labels import assign_label, sticker_task_classes, task_rotates_glyph
from .render import apply_intervention, render_sticker, sample_sticker_spec
from .schemas import StickerSpec

logger = logging.getLogger(__name__)


def sticker_sample(
    image: torch.Tensor,
    seed: int,
    lam: float,
    glyphs: GlyphSet,
    scale_range: tuple[float, float] = (0.1, 0.4),
    location_mode: LocationMode = "uniform",
    rotate: bool = True,
) -> tuple[torch.Tensor, StickerSpec]:
    """Stickered copy of one C×H×W image and the spec of the sticker used."""
    channels, height, width = image.shape
    generator = torch.Generator().manual_seed(seed)
    spec = sample_sticker_spec(generator, height, width, len(glyphs), scale_range, location_mode, rotate)
    sticker = render_sticker(spec, height, width, seed=seed, glyphs=glyphs)
    # grayscale inputs keep the leading sticker channels
    return apply_intervention(image, sticker.pixels[:channels], lam), spec


def sticker_record(spec: StickerSpec, glyphs: GlyphSet) -> dict:
    return spec.model_dump(mode="json") | {"letter": glyphs.letters[spec.glyph_index]}


def build_sticker_dataset(
    ds: Dataset,
    task: StickerTask,
    seed: int,
    lam: float = 0.4,
    *,
    n_classes: int = 10,
    scale_range: tuple[float, float] = (0.1, 0.4),
    location_mode: LocationMode = "uniform",
    glyph_seed: int = 0,
) -> Dataset:
    """
    One stickered copy of every sample in `ds`, labelled for `task`.

    Goal labels are carried over when present, so a source input yields D_{s,n} and a
    target input yields D_{t,n}. Each sticker is drawn from a seed derived from
    (`seed`, sample id), which makes the output independent of sample order.
    """
    if task not in STICKER_TASKS:
        raise ConfigError(f"unknown sticker task '{task}', expected one of {STICKER_TASKS}")
    if len(ds) == 0:
        raise ValueError(f"dataset {ds.domain_tag} is empty")

    glyphs = GlyphSet.select(n_classes, glyph_seed)
    domain_tag = f"{ds.domain_tag}-{task}"
    samples = []
    for sample in ds:
        image, spec = sticker_sample(
            sample.image,
            derive_seed(seed, sample.id),
            lam,
            glyphs,
            scale_range,
            location_mode,
            rotate=task_rotates_glyph(task),
        )
        samples.append(
            Sample(
                id=stable_sample_id(domain_tag, sample.id),
                image=image,
                goal_label=sample.goal_label,
                subsidiary_label=assign_label(spec, task),
                is_stickered=True,
                sticker=sticker_record(spec, glyphs) | {"task": task},
            )
        )

    logger.info(f"Built {len(samples)} stickered samples for {task} from {ds.domain_tag}")
    return ds.with_samples(
        samples,
        subsidiary_classes=sticker_task_classes(task, n_classes),
        domain_tag=domain_tag,
    )
