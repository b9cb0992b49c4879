import json

import pytest
import torch
from PIL import Image

from sticker_da.core import ConfigError, DatasetFormatError
from sticker_da.core.settings import ShiftSpec
from sticker_da.data import (
    Dataset,
    Sample,
    apply_shift,
    cycle_batches,
    derive_seed,
    export_image_folder,
    iterate_batches,
    load_image_folder,
    make_synthetic_domain_pair,
    stable_sample_id,
)


def _write_folder(root, classes: dict[str, int], size=(20, 12)):
    for name, count in classes.items():
        (root / name).mkdir(parents=True)
        for i in range(count):
            Image.new("RGB", size, color=(10 * i, 100, 200)).save(root / name / f"{i}.png")


def test_load_image_folder(tmp_path):
    _write_folder(tmp_path / "office", {"dog": 2, "cat": 3})

    ds = load_image_folder(tmp_path / "office", (32, 32))

    assert len(ds) == 5
    assert ds.goal_classes == 2
    assert ds.class_names == ("cat", "dog")
    assert ds.domain_tag == "office"
    assert ds.image_shape == (3, 32, 32)
    assert sorted(ds.goal_labels().tolist()) == [0, 0, 0, 1, 1]
    assert all(0.0 <= float(s.image.min()) and float(s.image.max()) <= 1.0 for s in ds)
    assert not ds.warnings


def test_load_image_folder_ids_are_stable(tmp_path):
    _write_folder(tmp_path / "d", {"a": 2, "b": 2})
    assert load_image_folder(tmp_path / "d", (32, 32)).ids == load_image_folder(tmp_path / "d", (32, 32)).ids


def test_load_image_folder_errors(tmp_path):
    with pytest.raises(DatasetFormatError):
        load_image_folder(tmp_path / "missing", (32, 32))

    (tmp_path / "flat").mkdir()
    with pytest.raises(DatasetFormatError, match="no class subdirectories"):
        load_image_folder(tmp_path / "flat", (32, 32))

    _write_folder(tmp_path / "holey", {"a": 1})
    (tmp_path / "holey" / "b").mkdir()
    with pytest.raises(DatasetFormatError, match="no images"):
        load_image_folder(tmp_path / "holey", (32, 32))


def test_synthetic_pair_shape_and_labels(source, target):
    assert len(source) == len(target) == 40
    assert source.goal_classes == target.goal_classes == 4
    assert source.class_names == ("arrow", "ell", "tee", "flag")
    assert source.image_shape == (3, 32, 32)
    assert source.has_goal_labels and target.has_goal_labels
    assert set(source.ids).isdisjoint(target.ids)
    assert not torch.equal(source.images(), target.images())


def test_synthetic_scenes_are_lit_from_above(source):
    images = source.images()
    top = images[:, :, :4].mean(dim=(1, 2, 3))
    bottom = images[:, :, -4:].mean(dim=(1, 2, 3))

    assert bool((top > bottom).all())
    assert not torch.equal(images, torch.rot90(images, k=2, dims=(2, 3)))


def test_color_shift_fades_contrast_gradually(source):
    images = source.images()
    spreads = [
        float(apply_shift(images, ShiftSpec(name="color", magnitude=m), seed=0).std(dim=(2, 3)).mean())
        for m in (0.0, 0.3, 0.6, 0.9)
    ]

    assert all(later < earlier for earlier, later in zip(spreads, spreads[1:]))
    assert spreads[-1] > 0.4 * spreads[0]


def test_synthetic_pair_is_deterministic():
    shift = ShiftSpec(name="noise", magnitude=0.3)
    a, _ = make_synthetic_domain_pair(2, 5, shift, seed=4, image_size=32)
    b, _ = make_synthetic_domain_pair(2, 5, shift, seed=4, image_size=32)
    c, _ = make_synthetic_domain_pair(2, 5, shift, seed=5, image_size=32)
    assert torch.equal(a.images(), b.images())
    assert not torch.equal(a.images(), c.images())


def test_zero_shift_gives_identical_pixels():
    s, t = make_synthetic_domain_pair(3, 4, {"name": "blur", "magnitude": 0.0}, seed=0, image_size=32)
    assert torch.equal(s.images(), t.images())


def test_synthetic_pair_rejects_bad_config():
    with pytest.raises(ConfigError):
        make_synthetic_domain_pair(3, 4, {"name": "fog", "magnitude": 0.5}, seed=0)
    with pytest.raises(ConfigError):
        make_synthetic_domain_pair(1, 4, ShiftSpec(), seed=0)
    with pytest.raises(ConfigError):
        make_synthetic_domain_pair(9, 4, ShiftSpec(), seed=0)


def test_batches_cover_the_epoch(toy_dataset):
    ds = toy_dataset(10)
    batches = list(iterate_batches(ds, batch_size=4, seed=3))

    assert [len(b) for b in batches] == [4, 4, 2]
    assert sorted(i for b in batches for i in b.ids) == sorted(ds.ids)
    assert batches[0].images.shape == (4, 3, 8, 8)


def test_batch_order_depends_only_on_seed(toy_dataset):
    ds = toy_dataset(10)
    first = [b.ids for b in iterate_batches(ds, 4, seed=3)]
    again = [b.ids for b in iterate_batches(ds, 4, seed=3)]
    other = [b.ids for b in iterate_batches(ds, 4, seed=4)]
    assert first == again
    assert first != other
    assert [b.ids for b in iterate_batches(ds, 10, seed=0, shuffle=False)] == [ds.ids]


def test_missing_labels_collate_to_minus_one(toy_dataset):
    ds = toy_dataset(3)
    unlabeled = ds.with_samples([Sample(id=s.id, image=s.image) for s in ds])
    batch = next(iterate_batches(unlabeled, 3, seed=0))
    assert batch.goal_labels.tolist() == [-1, -1, -1]
    assert batch.subsidiary_labels.tolist() == [-1, -1, -1]


def test_cycle_batches_spans_epochs(toy_dataset):
    ds = toy_dataset(5)
    stream = cycle_batches(ds, batch_size=2, seed=0)
    seen = [next(stream) for _ in range(6)]
    assert [len(b) for b in seen] == [2, 2, 1, 2, 2, 1]
    with pytest.raises(ValueError):
        next(cycle_batches(ds.with_samples([]), 2, seed=0))


def test_dataset_rejects_duplicate_ids_and_bad_labels():
    image = torch.zeros(3, 4, 4)
    with pytest.raises(ValueError, match="duplicate"):
        Dataset(samples=(Sample("a", image), Sample("a", image)), goal_classes=2, subsidiary_classes=4, domain_tag="x")
    with pytest.raises(ValueError, match="goal label"):
        Dataset(samples=(Sample("a", image, goal_label=2),), goal_classes=2, subsidiary_classes=4, domain_tag="x")
    with pytest.raises(ValueError, match="OOS index"):
        Dataset(
            samples=(Sample("a", image, subsidiary_label=1, is_oos=True),),
            goal_classes=2,
            subsidiary_classes=4,
            domain_tag="x",
        )


def test_dataset_state_round_trip(toy_dataset):
    ds = toy_dataset(4)
    restored = Dataset.from_state(ds.to_state())
    assert restored.ids == ds.ids
    assert torch.equal(restored.images(), ds.images())
    assert restored.goal_labels().tolist() == ds.goal_labels().tolist()
    assert [s.subsidiary_label for s in restored] == [None] * 4


def test_export_writes_class_folders_and_manifest(tmp_path, toy_dataset):
    ds = toy_dataset(4)
    stickered = ds.with_samples(
        [
            Sample(id=s.id, image=s.image, goal_label=s.goal_label, subsidiary_label=1, is_stickered=True, sticker={"scale": 0.2})
            for s in ds
        ]
    )

    root = export_image_folder(stickered, tmp_path / "out", task="sticker-rot")

    assert sorted(p.name for p in root.iterdir()) == ["class_000", "class_001", "manifest.jsonl"]
    assert len(list((root / "class_000").glob("*.png"))) == 2
    records = [json.loads(line) for line in (root / "manifest.jsonl").read_text().splitlines()]
    assert [r["id"] for r in records] == ds.ids
    assert records[0]["task"] == "sticker-rot"
    assert records[0]["scale"] == 0.2


def test_seed_and_id_helpers_are_stable():
    assert stable_sample_id("source", 3) == stable_sample_id("source", 3)
    assert stable_sample_id("source", 3) != stable_sample_id("target", 3)
    assert derive_seed(0, "a") == derive_seed(0, "a")
    assert derive_seed(0, "a") != derive_seed(0, "b")
    assert 0 <= derive_seed(1, 2, 3) < 2**63
