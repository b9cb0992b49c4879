from .tasks import (
    N_PRETEXT_CLASSES,
    apply_jigsaw,
    build_pretext_dataset,
    crop_quadrant,
    jigsaw_permutations,
    rotate_image,
)

__all__ = [
    "N_PRETEXT_CLASSES",
    "apply_jigsaw",
    "build_pretext_dataset",
    "crop_quadrant",
    "jigsaw_permutations",
    "rotate_image",
]
