import logging

import torch

from sticker_da.core.settings import LocationMode
from sticker_da.data.schemas import Dataset, Sample
from sticker_da.data.utils import derive_seed, stable_sample_id
from sticker_da.sticker.dataset import sticker_record, sticker_sample
from sticker_da.sticker.glyphs import GlyphSet

from .shuffle import shuffle_patches

logger = logging.getLogger(__name__)


def build_pseudo_oos_dataset(
    ds: Dataset,
    grid: int = 6,
    sticker_prob: float = 0.5,
    seed: int = 0,
    *,
    subsidiary_classes: int | None = None,
    lam: float = 0.4,
    n_classes: int = 10,
    scale_range: tuple[float, float] = (0.1, 0.4),
    location_mode: LocationMode = "uniform",
    glyph_seed: int = 0,
    rotate: bool = True,
) -> Dataset:
    """
    Build D_s^(od): one patch-shuffled copy of every source sample, each stickered
    independently with probability `sticker_prob` after shuffling. Stickers follow the
    in-source sticker distribution, so `rotate` should match the sticker task.

    Every output is labelled with the OOS index, which equals the number of in-source
    subsidiary classes (`subsidiary_classes`, defaulting to that of `ds`). Goal labels
    are dropped since shuffled images carry no goal information.
    """
    if not 0.0 <= sticker_prob <= 1.0:
        raise ValueError(f"sticker_prob must be in [0, 1], got {sticker_prob}")
    oos_index = ds.subsidiary_classes if subsidiary_classes is None else subsidiary_classes
    glyphs = GlyphSet.select(n_classes, glyph_seed)
    domain_tag = f"{ds.domain_tag}-oos"

    samples = []
    for sample in ds:
        sample_seed = derive_seed(seed, sample.id, "oos")
        image = shuffle_patches(sample.image, grid, sample_seed)

        generator = torch.Generator().manual_seed(sample_seed)
        stickered = torch.rand(1, generator=generator).item() < sticker_prob
        record = None
        if stickered:
            image, spec = sticker_sample(
                image, derive_seed(sample_seed, "sticker"), lam, glyphs, scale_range, location_mode, rotate
            )
            record = sticker_record(spec, glyphs)

        samples.append(
            Sample(
                id=stable_sample_id(domain_tag, sample.id),
                image=image,
                subsidiary_label=oos_index,
                is_oos=True,
                is_stickered=stickered,
                sticker=record,
            )
        )

    n_stickered = sum(s.is_stickered for s in samples)
    logger.info(f"Built {len(samples)} pseudo-OOS samples from {ds.domain_tag} ({n_stickered} stickered)")
    return ds.with_samples(samples, subsidiary_classes=oos_index, domain_tag=domain_tag)
