from .dataset import build_pseudo_oos_dataset
from .shuffle import patch_permutation, permute_patches, rearrange_patches, shuffle_patches

__all__ = [
    "build_pseudo_oos_dataset",
    "patch_permutation",
    "permute_patches",
    "rearrange_patches",
    "shuffle_patches",
]
