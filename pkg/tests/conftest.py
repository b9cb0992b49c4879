import pytest
import torch

from sticker_da.core.settings import ModelSettings, ShiftSpec, TrainSettings
from sticker_da.data import Dataset, Sample, make_synthetic_domain_pair, stable_sample_id
from sticker_da.model import build_model

IMAGE_SIZE = 32


@pytest.fixture(scope="session")
def domain_pair() -> tuple[Dataset, Dataset]:
    """4 shape classes × 10 samples per domain, target colour-shifted."""
    return make_synthetic_domain_pair(
        n_classes=4,
        n_per_class=10,
        shift=ShiftSpec(name="color", magnitude=0.6),
        seed=0,
        image_size=IMAGE_SIZE,
    )


@pytest.fixture(scope="session")
def source(domain_pair) -> Dataset:
    return domain_pair[0]


@pytest.fixture(scope="session")
def target(domain_pair) -> Dataset:
    return domain_pair[1]


@pytest.fixture
def tiny_arch() -> ModelSettings:
    return ModelSettings(channels=[4, 8, 8], feature_dim=8, bottleneck_dim=8)


@pytest.fixture
def tiny_model(tiny_arch):
    return build_model(tiny_arch, goal_classes=4, sticker_classes=10, seed=0)


@pytest.fixture
def fast_train() -> TrainSettings:
    return TrainSettings(batch_size=8, epochs_goal=1, epochs_sticker=1, epochs_adapt=1, deterministic=False)


def _toy_dataset(n: int, tag: str = "toy", goal_classes: int = 2, size: int = 8) -> Dataset:
    generator = torch.Generator().manual_seed(n)
    samples = tuple(
        Sample(id=stable_sample_id(tag, i), image=torch.rand(3, size, size, generator=generator), goal_label=i % goal_classes)
        for i in range(n)
    )
    return Dataset(samples=samples, goal_classes=goal_classes, subsidiary_classes=10, domain_tag=tag)


@pytest.fixture
def toy_dataset():
    """Factory of small random-pixel datasets with cycling goal labels."""
    return _toy_dataset
