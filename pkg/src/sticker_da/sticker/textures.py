"""Procedural textures filling the sticker glyph: stripes, checks, dots and noise."""

import math

import torch

TEXTURES = ("hstripes", "vstripes", "diagonal", "checker", "dots", "noise")


def make_texture(texture_index: int, height: int, width: int, seed: int) -> torch.Tensor:
    """H×W texture intensities in [0, 1]; the phase / noise field is drawn from `seed`."""
    if not 0 <= texture_index < len(TEXTURES):
        raise ValueError(f"texture_index must be in [0, {len(TEXTURES)}), got {texture_index}")

    generator = torch.Generator().manual_seed(seed)
    name = TEXTURES[texture_index]
    if name == "noise":
        return torch.rand(height, width, generator=generator)

    period = 2.0 + 4.0 * torch.rand(1, generator=generator).item()
    phase = 2 * math.pi * torch.rand(1, generator=generator).item()
    ys = torch.arange(height, dtype=torch.float32).unsqueeze(1).expand(height, width)
    xs = torch.arange(width, dtype=torch.float32).unsqueeze(0).expand(height, width)
    omega = 2 * math.pi / period

    if name == "hstripes":
        wave = torch.sin(omega * ys + phase)
    elif name == "vstripes":
        wave = torch.sin(omega * xs + phase)
    elif name == "diagonal":
        wave = torch.sin(omega * (xs + ys) / math.sqrt(2) + phase)
    elif name == "checker":
        wave = torch.sin(omega * xs + phase) * torch.sin(omega * ys + phase)
    else:
        wave = torch.cos(omega * xs + phase) + torch.cos(omega * ys + phase) - 1.0
    return (0.5 + 0.5 * wave).clamp(0, 1)
