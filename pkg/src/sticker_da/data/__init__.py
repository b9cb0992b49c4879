"""Datasets, image-folder IO, synthetic domain pairs and batching."""

from sticker_da.data.batching import collate, cycle_batches, iterate_batches
from sticker_da.data.folder import export_image_folder, load_image_folder
from sticker_da.data.schemas import MISSING_LABEL, Batch, Dataset, Sample
from sticker_da.data.synthetic import SHAPES, apply_shift, make_synthetic_domain_pair
from sticker_da.data.utils import derive_seed, stable_sample_id

__all__ = [
    "Batch",
    "Dataset",
    "Sample",
    "MISSING_LABEL",
    "SHAPES",
    "apply_shift",
    "collate",
    "cycle_batches",
    "derive_seed",
    "export_image_folder",
    "iterate_batches",
    "load_image_folder",
    "make_synthetic_domain_pair",
    "stable_sample_id",
]
