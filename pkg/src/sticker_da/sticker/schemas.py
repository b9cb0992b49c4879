import math
from dataclasses import dataclass

import torch
from pydantic import BaseModel, ConfigDict, Field, field_validator

from sticker_da.core.exceptions import InvalidStickerSpecError

from .textures import TEXTURES


class StickerBox(BaseModel):
    """Integer placement of a square sticker on an H×W canvas."""

    model_config = ConfigDict(frozen=True)

    x0: int
    y0: int
    side: int


class StickerSpec(BaseModel):
    """Everything needed to render one sticker; it fully determines the intervention."""

    model_config = ConfigDict(frozen=True)

    glyph_index: int = Field(ge=0, description="Index into the glyph set in use, the sticker class")
    texture_index: int = Field(ge=0, lt=len(TEXTURES), description="Procedural texture filling the glyph")
    color: tuple[float, float, float] = Field(description="RGB colour in [0, 1]")
    scale: float = Field(gt=0, le=1, description="Sticker side as a fraction of the shorter image side")
    center: tuple[float, float] = Field(description="(cx, cy) normalized to [0, 1], cy measured downward")
    rotation_class: int = Field(ge=0, le=3, description="Counter-clockwise rotation by rotation_class × 90°")

    @field_validator("color")
    @classmethod
    def _check_color(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(not 0.0 <= c <= 1.0 for c in value) or max(value) <= 0.0:
            raise ValueError(f"color channels must be in [0, 1] with at least one positive, got {value}")
        return value

    @field_validator("center")
    @classmethod
    def _check_center(cls, value: tuple[float, float]) -> tuple[float, float]:
        if any(not 0.0 <= c <= 1.0 for c in value):
            raise ValueError(f"center must lie in [0, 1]², got {value}")
        return value

    def box(self, height: int, width: int) -> StickerBox:
        """Pixel placement on an H×W canvas; raises if the sticker would leave the canvas."""
        side = max(1, math.floor(self.scale * min(height, width)))
        cx, cy = self.center
        x0 = round(cx * width - side / 2)
        y0 = round(cy * height - side / 2)
        if x0 < 0 or y0 < 0 or x0 + side > width or y0 + side > height:
            raise InvalidStickerSpecError(
                f"sticker of side {side} at center {self.center} exits the {height}×{width} canvas"
            )
        return StickerBox(x0=x0, y0=y0, side=side)


@dataclass(frozen=True)
class StickerImage:
    """A rendered sticker: C×H×W pixels that are exactly zero off the sticker footprint."""

    pixels: torch.Tensor
    spec: StickerSpec

    @property
    def shape(self) -> torch.Size:
        return self.pixels.shape
