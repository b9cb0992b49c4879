from sticker_da.core.settings import StickerTask

from .schemas import StickerSpec

N_LOCATION_CLASSES = 4
N_ROTATION_CLASSES = 4


def assign_location_label(spec: StickerSpec) -> int:
    """Quadrant of the sticker centre: 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right (ties go right/down)."""
    cx, cy = spec.center
    return 2 * int(cy >= 0.5) + int(cx >= 0.5)


def assign_rotation_label(spec: StickerSpec) -> int:
    return spec.rotation_class


def assign_class_label(spec: StickerSpec) -> int:
    return spec.glyph_index


def assign_label(spec: StickerSpec, task: StickerTask) -> int:
    if task == "sticker-loc":
        return assign_location_label(spec)
    if task == "sticker-rot":
        return assign_rotation_label(spec)
    return assign_class_label(spec)


def sticker_task_classes(task: StickerTask, n_classes: int) -> int:
    """Number of in-source subsidiary classes |C_n| the task emits; the OOS index equals this value."""
    if task == "sticker-loc":
        return N_LOCATION_CLASSES
    if task == "sticker-rot":
        return N_ROTATION_CLASSES
    return n_classes


def task_rotates_glyph(task: StickerTask) -> bool:
    """Only the rotation task draws a random glyph rotation; the others keep glyphs upright."""
    return task == "sticker-rot"
