"""Grid patch shuffling, the source of pseudo out-of-source images."""

import torch
import torch.nn.functional as F

from sticker_da.core.exceptions import ConfigError


def patch_permutation(grid: int, seed: int) -> torch.Tensor:
    """Seeded uniform permutation of the grid×grid patch indices (row-major)."""
    generator = torch.Generator().manual_seed(seed)
    return torch.randperm(grid * grid, generator=generator)


def permute_patches(x: torch.Tensor, grid: int, perm: torch.Tensor) -> torch.Tensor:
    """
    Rearrange the grid×grid patches of a C×H×W image whose sides are multiples of `grid`.
    Output patch i is input patch perm[i].
    """
    channels, height, width = x.shape
    ph, pw = height // grid, width // grid
    patches = x.reshape(channels, grid, ph, grid, pw).permute(1, 3, 0, 2, 4).reshape(grid * grid, channels, ph, pw)
    shuffled = patches[perm]
    return shuffled.reshape(grid, grid, channels, ph, pw).permute(2, 0, 3, 1, 4).reshape(channels, height, width)


def _nearest_multiple(size: int, grid: int) -> int:
    return max(grid, round(size / grid) * grid)


def rearrange_patches(x: torch.Tensor, grid: int, perm: torch.Tensor) -> torch.Tensor:
    """
    `permute_patches` for any image size: sides that are not multiples of `grid` are
    resized to the nearest multiple first and resized back afterwards.
    """
    if grid < 2:
        raise ConfigError(f"grid must be at least 2, got {grid}")
    _, height, width = x.shape
    if grid > min(height, width):
        raise ConfigError(f"grid {grid} exceeds the image side {min(height, width)}")

    if height % grid == 0 and width % grid == 0:
        return permute_patches(x, grid, perm)

    size = (_nearest_multiple(height, grid), _nearest_multiple(width, grid))
    resized = F.interpolate(x[None], size=size, mode="bilinear", align_corners=False)[0]
    shuffled = permute_patches(resized, grid, perm)
    restored = F.interpolate(shuffled[None], size=(height, width), mode="bilinear", align_corners=False)[0]
    return restored.clamp(0, 1)


def shuffle_patches(x: torch.Tensor, grid: int, seed: int) -> torch.Tensor:
    """Split `x` into grid×grid equal patches and shuffle them with a seeded permutation."""
    if grid < 2:
        raise ConfigError(f"grid must be at least 2, got {grid}")
    return rearrange_patches(x, grid, patch_permutation(grid, seed))
