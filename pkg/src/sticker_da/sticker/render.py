"""Sticker synthesis and the masked-mixup sticker intervention."""

import torch
import torch.nn.functional as F

from sticker_da.core.exceptions import InvalidStickerSpecError
from sticker_da.core.settings import LocationMode

from .glyphs import GlyphSet
from .schemas import StickerImage, StickerSpec
from .textures import TEXTURES, make_texture

DEFAULT_GLYPHS = GlyphSet.select(10, glyph_seed=0)

# Positions are drawn in the feasible range [0, 1]² of top-left offsets; "center" keeps
# offsets within this Chebyshev radius of the middle, "periphery" keeps the rest.
CENTER_RADIUS = 0.25


def sample_sticker_spec(
    generator: torch.Generator,
    height: int,
    width: int,
    n_classes: int,
    scale_range: tuple[float, float] = (0.1, 0.4),
    location_mode: LocationMode = "uniform",
    rotate: bool = True,
) -> StickerSpec:
    """
    Draw glyph, texture, colour, scale, position and rotation uniformly from `generator`.
    Without `rotate` the glyph stays upright; the draw sequence is the same either way.
    """

    def uniform(lo: float, hi: float) -> float:
        return lo + (hi - lo) * torch.rand(1, generator=generator).item()

    glyph_index = int(torch.randint(n_classes, (1,), generator=generator))
    texture_index = int(torch.randint(len(TEXTURES), (1,), generator=generator))
    hue = [uniform(0.2, 1.0) for _ in range(3)]
    # brightest channel at full intensity
    color = tuple(c / max(hue) for c in hue)
    scale = uniform(*scale_range)
    rotation_class = int(torch.randint(4, (1,), generator=generator))
    if not rotate:
        rotation_class = 0

    side = max(1, int(scale * min(height, width)))
    while True:
        u = (uniform(0.0, 1.0), uniform(0.0, 1.0))
        near_center = max(abs(u[0] - 0.5), abs(u[1] - 0.5)) < CENTER_RADIUS
        if location_mode == "uniform" or (location_mode == "center") == near_center:
            break

    x0 = round(u[0] * (width - side))
    y0 = round(u[1] * (height - side))
    center = ((x0 + side / 2) / width, (y0 + side / 2) / height)

    return StickerSpec(
        glyph_index=glyph_index,
        texture_index=texture_index,
        color=color,  # type: ignore[arg-type]
        scale=scale,
        center=center,
        rotation_class=rotation_class,
    )


def render_sticker(
    spec: StickerSpec,
    height: int,
    width: int,
    seed: int,
    glyphs: GlyphSet = DEFAULT_GLYPHS,
) -> StickerImage:
    """
    Paste the rotated, scaled and textured glyph on a black 3×H×W canvas.
    The glyph bitmap is rotated before it is scaled, so rendering rotation class k
    equals rendering class 0 from a bitmap already rotated by k·90°.
    """
    if spec.glyph_index >= len(glyphs):
        raise InvalidStickerSpecError(f"glyph_index {spec.glyph_index} outside a glyph set of {len(glyphs)}")
    box = spec.box(height, width)

    bitmap = torch.rot90(glyphs.bitmaps[spec.glyph_index], k=spec.rotation_class, dims=(0, 1))
    # max-pooling resize keeps every glyph stroke visible at any sticker size
    footprint = F.adaptive_max_pool2d(bitmap.float()[None, None], (box.side, box.side))[0, 0] > 0

    intensity = 0.5 + 0.5 * make_texture(spec.texture_index, box.side, box.side, seed)
    color = torch.tensor(spec.color, dtype=torch.float32)[:, None, None]
    patch = color * intensity[None] * footprint[None]

    canvas = torch.zeros(3, height, width)
    canvas[:, box.y0 : box.y0 + box.side, box.x0 : box.x0 + box.side] = patch
    return StickerImage(pixels=canvas, spec=spec)


def compute_mask(x_n: StickerImage | torch.Tensor) -> torch.Tensor:
    """m(u) = 1 where any channel of the sticker image is nonzero (H×W, or N×H×W for batches)."""
    pixels = x_n.pixels if isinstance(x_n, StickerImage) else x_n
    return (pixels != 0).any(dim=-3)


def apply_intervention(x: torch.Tensor, x_n: StickerImage | torch.Tensor, lam: float) -> torch.Tensor:
    """
    T(x, x_n) = m ⊙ (λx + (1 − λ)x_n) + (1 − m) ⊙ x, clamped to [0, 1].
    Off-mask pixels are returned bit-identical to `x`.
    """
    pixels = x_n.pixels if isinstance(x_n, StickerImage) else x_n
    if x.shape != pixels.shape:
        raise InvalidStickerSpecError(f"image shape {tuple(x.shape)} does not match sticker {tuple(pixels.shape)}")
    if not 0.0 <= lam <= 1.0:
        raise InvalidStickerSpecError(f"mixup ratio must be in [0, 1], got {lam}")

    mask = compute_mask(pixels).unsqueeze(-3)
    mixed = (lam * x + (1 - lam) * pixels).clamp(0, 1)
    return torch.where(mask, mixed, x)
