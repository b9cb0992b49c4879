"""
Desk-scale domain pairs: rendered shapes as the source domain and the same
shapes under a deterministic corruption as the target domain.

Shapes are upright stroke figures without rotational symmetry, lit from above,
so rotating an image moves it off the source distribution.
"""

import logging
import math

import numpy as np
import torch
from PIL import Image, ImageDraw
from torchvision.transforms.functional import gaussian_blur

from sticker_da.core.exceptions import ConfigError
from sticker_da.core.settings import ShiftSpec

from .schemas import Dataset, Sample
from .utils import derive_seed, stable_sample_id

logger = logging.getLogger(__name__)

Point = tuple[float, float]

# figures in a unit box, y pointing down: open strokes and filled polygons
SHAPES: dict[str, dict[str, list[list[Point]]]] = {
    "arrow": {"strokes": [[(-0.9, 0.0), (0.8, 0.0)], [(0.25, -0.5), (0.8, 0.0), (0.25, 0.5)]]},
    "ell": {"strokes": [[(-0.5, -0.9), (-0.5, 0.8), (0.7, 0.8)]]},
    "tee": {"strokes": [[(-0.8, -0.75), (0.8, -0.75)], [(0.0, -0.75), (0.0, 0.9)]]},
    "flag": {
        "strokes": [[(-0.55, -0.9), (-0.55, 0.9)]],
        "polygons": [[(-0.55, -0.9), (0.8, -0.55), (-0.55, -0.15)]],
    },
    "hook": {"strokes": [[(0.4, -0.9), (0.4, 0.45), (0.1, 0.8), (-0.3, 0.8), (-0.6, 0.45)]]},
    "step": {"strokes": [[(-0.9, 0.75), (-0.3, 0.75), (-0.3, 0.05), (0.3, 0.05), (0.3, -0.65), (0.9, -0.65)]]},
    "fork": {"strokes": [[(0.0, 0.9), (0.0, 0.0)], [(-0.7, -0.8), (0.0, 0.0), (0.7, -0.8)]]},
    "wedge": {"polygons": [[(-0.8, 0.7), (0.8, 0.7), (0.0, -0.8)]]},
}

# per-channel tint of the color shift at magnitude 1
COLOR_TINT = (0.08, 0.02, -0.06)
# contrast lost towards the image mean at magnitude 1
COLOR_FADE = 0.5


def _place(points: list[Point], cx: float, cy: float, r: float, angle: float) -> list[Point]:
    cos, sin = math.cos(angle), math.sin(angle)
    return [(cx + r * (x * cos - y * sin), cy + r * (x * sin + y * cos)) for x, y in points]


def _shape_mask(shape: str, size: int, cx: float, cy: float, r: float, angle: float) -> np.ndarray:
    mask = Image.new("L", (size, size), 0)
    draw = ImageDraw.Draw(mask)
    figure = SHAPES[shape]
    width = max(2, round(r * 0.35))
    for stroke in figure.get("strokes", []):
        draw.line(_place(stroke, cx, cy, r, angle), fill=255, width=width, joint="curve")
    for polygon in figure.get("polygons", []):
        draw.polygon(_place(polygon, cx, cy, r, angle), fill=255)
    return np.asarray(mask, dtype=np.float32) / 255.0


def render_shape(shape: str, size: int, rng: np.random.Generator) -> torch.Tensor:
    """
    One upright figure with jittered pose and colours, placed above the image centre
    on a dark background that brightens towards the top.
    """
    background = rng.uniform(0.0, 0.3, size=3)
    light = rng.uniform(0.08, 0.2)
    fill = rng.uniform(0.6, 1.0, size=3)
    radius = size * rng.uniform(0.2, 0.3)
    cx = size * rng.uniform(0.4, 0.6)
    cy = size * rng.uniform(0.36, 0.5)
    angle = math.radians(rng.uniform(-12.0, 12.0))

    rows = 1.0 - np.arange(size, dtype=np.float32) / max(1, size - 1)
    canvas = background[:, None, None] + light * rows[None, :, None]
    mask = _shape_mask(shape, size, cx, cy, radius, angle)[None]
    image = canvas * (1.0 - mask) + fill[:, None, None] * mask
    return torch.from_numpy(np.clip(image, 0.0, 1.0).astype(np.float32))


def apply_shift(images: torch.Tensor, shift: ShiftSpec, seed: int) -> torch.Tensor:
    """Apply a named corruption to a N×C×H×W batch; magnitude 0 returns the input unchanged."""
    m = shift.magnitude
    if m == 0:
        return images.clone()

    if shift.name == "color":
        # fade towards each image's mean colour and tint; separability grows smoothly with m
        mean = images.mean(dim=(2, 3), keepdim=True)
        tint = torch.tensor(COLOR_TINT, dtype=images.dtype)[: images.shape[1]].view(1, -1, 1, 1)
        return (mean + (1.0 - COLOR_FADE * m) * (images - mean) + m * tint).clamp(0, 1)
    if shift.name == "noise":
        generator = torch.Generator().manual_seed(seed)
        noise = torch.randn(images.shape, generator=generator)
        return (images + 0.5 * m * noise).clamp(0, 1)
    if shift.name == "blur":
        sigma = 0.1 + 2.5 * m
        kernel = 2 * math.ceil(3 * sigma) + 1
        return gaussian_blur(images, kernel_size=[kernel, kernel], sigma=[sigma, sigma]).clamp(0, 1)

    raise ConfigError(f"unknown shift '{shift.name}', expected one of color, noise, blur")


def make_synthetic_domain_pair(
    n_classes: int,
    n_per_class: int,
    shift: ShiftSpec | dict,
    seed: int,
    image_size: int = 48,
    subsidiary_classes: int = 10,
    paired: bool = True,
) -> tuple[Dataset, Dataset]:
    """
    Render a labelled source domain of shapes and a target domain with the same
    class set under `shift`. With `paired` the target re-uses the source instances,
    so a zero-magnitude shift yields pixel-identical domains.
    """
    if isinstance(shift, dict):
        if shift.get("name") not in ("color", "noise", "blur"):
            raise ConfigError(f"unknown shift '{shift.get('name')}', expected one of color, noise, blur")
        shift = ShiftSpec(**shift)
    if n_classes < 2:
        raise ConfigError(f"n_classes must be >= 2, got {n_classes}")
    if n_classes > len(SHAPES):
        raise ConfigError(f"at most {len(SHAPES)} synthetic classes are available, got {n_classes}")

    class_names = tuple(list(SHAPES)[:n_classes])

    def render_domain(domain_seed: int) -> tuple[torch.Tensor, list[int]]:
        rng = np.random.default_rng(domain_seed)
        images, labels = [], []
        for label, shape in enumerate(class_names):
            for _ in range(n_per_class):
                images.append(render_shape(shape, image_size, rng))
                labels.append(label)
        return torch.stack(images), labels

    source_images, labels = render_domain(derive_seed(seed, "source"))
    if paired:
        target_clean = source_images
    else:
        target_clean, _ = render_domain(derive_seed(seed, "target"))
    target_images = apply_shift(target_clean, shift, seed=derive_seed(seed, "shift"))

    def build(tag: str, images: torch.Tensor) -> Dataset:
        samples = tuple(
            Sample(id=stable_sample_id(tag, i), image=images[i].clone(), goal_label=labels[i])
            for i in range(len(labels))
        )
        return Dataset(
            samples=samples,
            goal_classes=n_classes,
            subsidiary_classes=subsidiary_classes,
            domain_tag=tag,
            class_names=class_names,
        )

    logger.info(
        f"Synthesised {len(labels)} samples per domain ({n_classes} classes, "
        f"shift {shift.name}={shift.magnitude}, seed {seed})"
    )
    return build("source", source_images), build("target", target_images)
