from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from typing import Any

import torch

MISSING_LABEL = -1


@dataclass(frozen=True)
class Sample:
    """One image with its optional goal label and subsidiary (sticker / OOS) label."""

    id: str
    image: torch.Tensor  # C×H×W float32 in [0, 1]
    goal_label: int | None = None
    subsidiary_label: int | None = None
    is_oos: bool = False
    is_stickered: bool = False
    # StickerSpec fields when the sample carries a sticker, kept as plain data for export
    sticker: dict[str, Any] | None = None

    def __post_init__(self):
        if self.image.dim() != 3:
            raise ValueError(f"sample {self.id}: image must be C×H×W, got shape {tuple(self.image.shape)}")
        if (self.is_oos or self.is_stickered) and self.subsidiary_label is None:
            raise ValueError(f"sample {self.id}: stickered and OOS samples need a subsidiary label")


@dataclass(frozen=True)
class Dataset:
    """An immutable, ordered collection of samples from one domain."""

    samples: tuple[Sample, ...]
    goal_classes: int
    subsidiary_classes: int
    domain_tag: str
    class_names: tuple[str, ...] = ()
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        seen: set[str] = set()
        for s in self.samples:
            if s.id in seen:
                raise ValueError(f"dataset {self.domain_tag}: duplicate sample id {s.id}")
            seen.add(s.id)
            if s.goal_label is not None and not 0 <= s.goal_label < self.goal_classes:
                raise ValueError(f"sample {s.id}: goal label {s.goal_label} outside [0, {self.goal_classes})")
            if s.subsidiary_label is not None and not 0 <= s.subsidiary_label <= self.subsidiary_classes:
                raise ValueError(
                    f"sample {s.id}: subsidiary label {s.subsidiary_label} outside [0, {self.subsidiary_classes}]"
                )
            if s.is_oos and s.subsidiary_label != self.subsidiary_classes:
                raise ValueError(f"sample {s.id}: OOS samples must carry the OOS index {self.subsidiary_classes}")

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def __getitem__(self, index: int) -> Sample:
        return self.samples[index]

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.samples]

    @property
    def has_goal_labels(self) -> bool:
        return bool(self.samples) and all(s.goal_label is not None for s in self.samples)

    @property
    def has_subsidiary_labels(self) -> bool:
        return bool(self.samples) and all(s.subsidiary_label is not None for s in self.samples)

    @property
    def image_shape(self) -> tuple[int, int, int]:
        return tuple(self.samples[0].image.shape)  # type: ignore[return-value]

    def images(self) -> torch.Tensor:
        return torch.stack([s.image for s in self.samples])

    def goal_labels(self) -> torch.Tensor:
        return _labels([s.goal_label for s in self.samples])

    def subsidiary_labels(self) -> torch.Tensor:
        return _labels([s.subsidiary_label for s in self.samples])

    def with_samples(self, samples: list[Sample] | tuple[Sample, ...], **changes: Any) -> "Dataset":
        return replace(self, samples=tuple(samples), **changes)

    def subset(self, indices: list[int]) -> "Dataset":
        return self.with_samples([self.samples[i] for i in indices])

    def union(self, other: "Dataset", domain_tag: str | None = None) -> "Dataset":
        """
        Concatenate two datasets over the same goal label set. The subsidiary label space
        is taken from whichever side carries subsidiary labels; both sides carrying
        different ones is an error.
        """
        if other.goal_classes != self.goal_classes:
            raise ValueError(f"cannot join {self.domain_tag} and {other.domain_tag}: goal label sets differ")
        labelled = [d for d in (self, other) if any(s.subsidiary_label is not None for s in d)]
        if len({d.subsidiary_classes for d in labelled}) > 1:
            raise ValueError(f"cannot join {self.domain_tag} and {other.domain_tag}: subsidiary label spaces differ")
        subsidiary_classes = labelled[0].subsidiary_classes if labelled else self.subsidiary_classes
        return self.with_samples(
            self.samples + other.samples,
            subsidiary_classes=subsidiary_classes,
            domain_tag=domain_tag or f"{self.domain_tag}+{other.domain_tag}",
            warnings=self.warnings + other.warnings,
        )

    def to_state(self) -> dict[str, Any]:
        """Plain-container form, loadable with `torch.load(weights_only=True)`."""
        return {
            "domain_tag": self.domain_tag,
            "goal_classes": self.goal_classes,
            "subsidiary_classes": self.subsidiary_classes,
            "class_names": list(self.class_names),
            "warnings": list(self.warnings),
            "ids": self.ids,
            "images": self.images() if self.samples else torch.empty(0),
            "goal_labels": self.goal_labels(),
            "subsidiary_labels": self.subsidiary_labels(),
            "is_oos": torch.tensor([s.is_oos for s in self.samples], dtype=torch.bool),
            "is_stickered": torch.tensor([s.is_stickered for s in self.samples], dtype=torch.bool),
            "stickers": [s.sticker for s in self.samples],
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "Dataset":
        samples = [
            Sample(
                id=sample_id,
                image=state["images"][i],
                goal_label=_optional(state["goal_labels"][i]),
                subsidiary_label=_optional(state["subsidiary_labels"][i]),
                is_oos=bool(state["is_oos"][i]),
                is_stickered=bool(state["is_stickered"][i]),
                sticker=state["stickers"][i],
            )
            for i, sample_id in enumerate(state["ids"])
        ]
        return cls(
            samples=tuple(samples),
            goal_classes=state["goal_classes"],
            subsidiary_classes=state["subsidiary_classes"],
            domain_tag=state["domain_tag"],
            class_names=tuple(state["class_names"]),
            warnings=tuple(state["warnings"]),
        )


@dataclass(frozen=True)
class Batch:
    """A collated mini-batch; missing labels are encoded as -1."""

    batch_id: str
    ids: list[str]
    images: torch.Tensor
    goal_labels: torch.Tensor
    subsidiary_labels: torch.Tensor
    is_oos: torch.Tensor

    def __len__(self) -> int:
        return len(self.ids)

    def to(self, device: torch.device | str) -> "Batch":
        return replace(
            self,
            images=self.images.to(device),
            goal_labels=self.goal_labels.to(device),
            subsidiary_labels=self.subsidiary_labels.to(device),
            is_oos=self.is_oos.to(device),
        )


def _labels(values: list[int | None]) -> torch.Tensor:
    return torch.tensor([MISSING_LABEL if v is None else v for v in values], dtype=torch.long)


def _optional(value: torch.Tensor) -> int | None:
    v = int(value)
    return None if v == MISSING_LABEL else v
