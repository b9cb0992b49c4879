from .dataset import build_sticker_dataset, sticker_sample
from .glyphs import ALPHABET_SIZE, GlyphSet, glyph_bitmap
from .labels import (
    assign_class_label,
    assign_label,
    assign_location_label,
    assign_rotation_label,
    sticker_task_classes,
    task_rotates_glyph,
)
from .render import apply_intervention, compute_mask, render_sticker, sample_sticker_spec
from .schemas import StickerBox, StickerImage, StickerSpec
from .textures import TEXTURES, make_texture

__all__ = [
    "ALPHABET_SIZE",
    "GlyphSet",
    "StickerBox",
    "StickerImage",
    "StickerSpec",
    "TEXTURES",
    "apply_intervention",
    "assign_class_label",
    "assign_label",
    "assign_location_label",
    "assign_rotation_label",
    "build_sticker_dataset",
    "compute_mask",
    "glyph_bitmap",
    "make_texture",
    "render_sticker",
    "sample_sticker_spec",
    "sticker_sample",
    "sticker_task_classes",
    "task_rotates_glyph",
]
