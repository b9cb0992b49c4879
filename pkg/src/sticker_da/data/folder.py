"""Image-folder loading and export (`root/<class_name>/<image files>`)."""

import json
import logging
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from sticker_da.core.exceptions import DatasetFormatError

from .schemas import Dataset, Sample
from .utils import stable_sample_id

logger = logging.getLogger(__name__)

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".bmp", ".gif", ".webp"}


def image_to_tensor(im: Image.Image, image_size: tuple[int, int]) -> torch.Tensor:
    """PIL image -> C×H×W float32 tensor in [0, 1], resized to (H, W)."""
    height, width = image_size
    im = im.convert("RGB").resize((width, height), resample=Image.Resampling.BILINEAR)
    array = np.asarray(im, dtype=np.float32) / 255.0
    return torch.from_numpy(array).permute(2, 0, 1).contiguous()


def tensor_to_image(x: torch.Tensor) -> Image.Image:
    array = (x.clamp(0, 1).permute(1, 2, 0).cpu().numpy() * 255.0).round().astype(np.uint8)
    return Image.fromarray(array)


def label_coverage_warnings(ds_samples: list[Sample], goal_classes: int, domain_tag: str) -> list[str]:
    present = {s.goal_label for s in ds_samples if s.goal_label is not None}
    missing = sorted(set(range(goal_classes)) - present)
    if not missing:
        return []
    message = f"dataset {domain_tag}: goal classes {missing} have no samples"
    logger.warning(message)
    return [message]


def load_image_folder(
    root: str | Path,
    image_size: tuple[int, int],
    domain_tag: str | None = None,
    subsidiary_classes: int = 10,
) -> Dataset:
    """
    Load `root/<class_name>/<images>` into a Dataset. Labels follow the sorted
    subdirectory names; images are resized to `image_size` and scaled to [0, 1].
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetFormatError(str(root), "dataset root does not exist")

    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DatasetFormatError(str(root), "no class subdirectories found")

    tag = domain_tag or root.name
    samples: list[Sample] = []
    for label, class_dir in enumerate(class_dirs):
        files = sorted(p for p in class_dir.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS)
        if not files:
            raise DatasetFormatError(str(class_dir), "class directory contains no images")

        for path in files:
            try:
                with Image.open(path) as im:
                    image = image_to_tensor(im, image_size)
            except (UnidentifiedImageError, OSError) as e:
                logger.warning(f"Skipping unreadable image {path}: {e}")
                continue
            relative = path.relative_to(root).as_posix()
            samples.append(Sample(id=stable_sample_id(tag, relative), image=image, goal_label=label))

    logger.debug(f"Loaded {len(samples)} images in {len(class_dirs)} classes from {root}")

    return Dataset(
        samples=tuple(samples),
        goal_classes=len(class_dirs),
        subsidiary_classes=subsidiary_classes,
        domain_tag=tag,
        class_names=tuple(p.name for p in class_dirs),
        warnings=tuple(label_coverage_warnings(samples, len(class_dirs), tag)),
    )


def export_image_folder(ds: Dataset, root: str | Path, task: str | None = None) -> Path:
    """
    Write `ds` as `root/<class>/<id>.png`. Samples without a goal label go to `unlabeled/`.
    Stickered or OOS datasets also get a `manifest.jsonl` audit record per sample.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)

    records: list[dict] = []
    for s in ds:
        if s.goal_label is None:
            class_name = "unlabeled"
        elif ds.class_names:
            class_name = ds.class_names[s.goal_label]
        else:
            class_name = f"class_{s.goal_label:03d}"
        target_dir = root / class_name
        target_dir.mkdir(exist_ok=True)
        tensor_to_image(s.image).save(target_dir / f"{s.id}.png")

        if s.is_stickered or s.is_oos:
            records.append(
                {
                    "id": s.id,
                    "task": task,
                    "subsidiary_label": s.subsidiary_label,
                    "is_oos": s.is_oos,
                    **(s.sticker or {}),
                }
            )

    if records:
        with open(root / "manifest.jsonl", "w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record) + "\n")

    logger.debug(f"Exported {len(ds)} samples of {ds.domain_tag} to {root}")
    return root
