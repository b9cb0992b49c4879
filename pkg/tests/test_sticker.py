import numpy as np
import pytest
import torch
from pydantic import ValidationError

from sticker_da.core import ConfigError, InvalidStickerSpecError
from sticker_da.sticker import (
    GlyphSet,
    StickerSpec,
    apply_intervention,
    assign_class_label,
    assign_label,
    assign_location_label,
    assign_rotation_label,
    build_sticker_dataset,
    compute_mask,
    render_sticker,
    sample_sticker_spec,
    sticker_task_classes,
    task_rotates_glyph,
)
from sticker_da.sticker.dataset import sticker_sample
from sticker_da.sticker.render import DEFAULT_GLYPHS


def _spec(**changes) -> StickerSpec:
    values = dict(
        glyph_index=0, texture_index=0, color=(0.9, 0.5, 0.2), scale=0.5, center=(0.5, 0.5), rotation_class=0
    )
    return StickerSpec(**(values | changes))


def test_render_places_sticker_in_its_box():
    sticker = render_sticker(_spec(), 28, 28, seed=0)
    box = _spec().box(28, 28)
    assert (box.x0, box.y0, box.side) == (7, 7, 14)

    mask = compute_mask(sticker)
    assert sticker.shape == (3, 28, 28)
    assert mask.any()
    outside = mask.clone()
    outside[box.y0 : box.y0 + box.side, box.x0 : box.x0 + box.side] = False
    assert not outside.any()
    assert float(sticker.pixels.max()) <= 1.0


def test_rotation_class_rotates_the_footprint():
    # a centred sticker whose side is a multiple of the 7×7 glyph grid
    upright = compute_mask(render_sticker(_spec(), 28, 28, seed=1))
    for k in range(1, 4):
        rotated = compute_mask(render_sticker(_spec(rotation_class=k), 28, 28, seed=1))
        assert torch.equal(rotated, torch.rot90(upright, k=k, dims=(0, 1)))


def test_rendering_rotation_equals_rotated_bitmap():
    bitmap = DEFAULT_GLYPHS.bitmaps[3]
    rotated_glyphs = DEFAULT_GLYPHS.with_bitmap(3, torch.rot90(bitmap, k=2, dims=(0, 1)))

    a = render_sticker(_spec(glyph_index=3, rotation_class=2, scale=0.3, center=(0.3, 0.6)), 40, 40, seed=5)
    b = render_sticker(_spec(glyph_index=3, rotation_class=0, scale=0.3, center=(0.3, 0.6)), 40, 40, seed=5, glyphs=rotated_glyphs)
    assert torch.equal(a.pixels, b.pixels)


def test_sticker_leaving_the_canvas_is_rejected():
    with pytest.raises(InvalidStickerSpecError):
        render_sticker(_spec(center=(0.1, 0.1)), 32, 32, seed=0)
    with pytest.raises(InvalidStickerSpecError):
        render_sticker(_spec(glyph_index=len(DEFAULT_GLYPHS)), 32, 32, seed=0)


@pytest.mark.parametrize(
    "changes",
    [{"color": (0.0, 0.0, 0.0)}, {"color": (1.2, 0.0, 0.0)}, {"rotation_class": 4}, {"scale": 0.0}, {"center": (1.5, 0.5)}],
)
def test_invalid_spec_fields(changes):
    with pytest.raises(ValidationError):
        _spec(**changes)


def test_intervention_with_lambda_one_is_identity():
    x = torch.rand(3, 32, 32, generator=torch.Generator().manual_seed(0))
    sticker = render_sticker(_spec(), 32, 32, seed=0)
    assert torch.equal(apply_intervention(x, sticker, 1.0), x)


def test_intervention_leaves_off_mask_pixels_untouched():
    x = torch.rand(3, 32, 32, generator=torch.Generator().manual_seed(1))
    sticker = render_sticker(_spec(scale=0.3, center=(0.7, 0.3)), 32, 32, seed=2)
    mask = compute_mask(sticker)

    out = apply_intervention(x, sticker, 0.4)

    assert torch.equal(out[:, ~mask], x[:, ~mask])
    assert not torch.equal(out[:, mask], x[:, mask])
    expected = (0.4 * x + 0.6 * sticker.pixels)[:, mask]
    torch.testing.assert_close(out[:, mask], expected)


def test_intervention_mixes_on_mask_pixels():
    x = torch.full((3, 2, 2), 0.5)
    x_n = torch.zeros(3, 2, 2)
    x_n[:, 0, 0] = 0.9
    out = apply_intervention(x, x_n, 0.4)
    torch.testing.assert_close(out[:, 0, 0], torch.full((3,), 0.74))
    assert torch.equal(out[:, 1, 1], x[:, 1, 1])


def test_mask_is_the_union_over_channels():
    x_n = torch.zeros(3, 2, 2)
    x_n[0, 0, 0] = 0.3
    x_n[2, 1, 1] = 0.7
    assert compute_mask(x_n).tolist() == [[True, False], [False, True]]


def test_intervention_rejects_bad_inputs():
    x = torch.rand(3, 8, 8)
    with pytest.raises(InvalidStickerSpecError):
        apply_intervention(x, torch.zeros(3, 8, 9), 0.4)
    with pytest.raises(InvalidStickerSpecError):
        apply_intervention(x, torch.zeros(3, 8, 8), 1.5)


@pytest.mark.parametrize("location_mode", ["uniform", "center", "periphery"])
def test_sampled_stickers_fit_and_respect_the_scale_range(location_mode):
    generator = torch.Generator().manual_seed(0)
    for _ in range(200):
        spec = sample_sticker_spec(generator, 48, 48, n_classes=10, scale_range=(0.1, 0.4), location_mode=location_mode)
        sticker = render_sticker(spec, 48, 48, seed=0)
        assert 0.1 <= spec.scale <= 0.4
        assert int(compute_mask(sticker).sum()) <= (0.4 * 48) ** 2
        assert 0 <= spec.glyph_index < 10


def test_center_mode_keeps_stickers_near_the_middle():
    generator = torch.Generator().manual_seed(3)
    for _ in range(100):
        spec = sample_sticker_spec(generator, 64, 64, n_classes=10, scale_range=(0.1, 0.2), location_mode="center")
        assert all(0.2 < c < 0.8 for c in spec.center)


def test_location_labels_follow_quadrants():
    assert [assign_location_label(_spec(scale=0.1, center=c)) for c in [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]] == [
        0,
        1,
        2,
        3,
    ]
    # ties go right and down
    assert assign_location_label(_spec(scale=0.1, center=(0.5, 0.5))) == 3


def test_labels_per_task():
    spec = _spec(glyph_index=7, rotation_class=3, scale=0.1, center=(0.8, 0.2))
    assert assign_label(spec, "sticker-clsf") == 7
    assert assign_label(spec, "sticker-rot") == 3
    assert assign_label(spec, "sticker-loc") == 1
    assert sticker_task_classes("sticker-loc", 10) == 4
    assert sticker_task_classes("sticker-rot", 10) == 4
    assert sticker_task_classes("sticker-clsf", 10) == 10


def test_glyph_selection_is_seeded():
    a = GlyphSet.select(10, glyph_seed=0)
    assert len(set(a.letters)) == 10
    assert a.letters == GlyphSet.select(10, glyph_seed=0).letters
    assert a.letters != GlyphSet.select(10, glyph_seed=1).letters
    with pytest.raises(ValueError):
        GlyphSet.select(27)


def test_sticker_sample_handles_grayscale():
    image, spec = sticker_sample(torch.zeros(1, 32, 32), seed=0, lam=0.0, glyphs=DEFAULT_GLYPHS)
    assert image.shape == (1, 32, 32)
    assert image.any()


@pytest.mark.parametrize("task", ["sticker-loc", "sticker-rot", "sticker-clsf"])
def test_build_sticker_dataset(source, task):
    ds = build_sticker_dataset(source, task, seed=0)

    assert len(ds) == len(source)
    assert ds.subsidiary_classes == sticker_task_classes(task, 10)
    assert ds.goal_labels().tolist() == source.goal_labels().tolist()
    labels = ds.subsidiary_labels()
    assert int(labels.min()) >= 0 and int(labels.max()) < ds.subsidiary_classes
    assert all(s.is_stickered and not s.is_oos for s in ds)
    assert all(s.sticker["task"] == task for s in ds)
    assert set(ds.ids).isdisjoint(source.ids)


def test_stickers_depend_on_seed_and_id_not_order(source):
    ds = build_sticker_dataset(source, "sticker-clsf", seed=4)
    reversed_ds = build_sticker_dataset(source.with_samples(source.samples[::-1]), "sticker-clsf", seed=4)
    other = build_sticker_dataset(source, "sticker-clsf", seed=5)

    by_id = {s.id: s.image for s in reversed_ds}
    assert all(torch.equal(s.image, by_id[s.id]) for s in ds)
    assert not torch.equal(ds.images(), other.images())


def test_build_sticker_dataset_errors(source):
    with pytest.raises(ConfigError):
        build_sticker_dataset(source, "sticker-size", seed=0)
    with pytest.raises(ValueError):
        build_sticker_dataset(source.with_samples([]), "sticker-rot", seed=0)


def test_intervention_invariants_on_random_triples():
    generator = torch.Generator().manual_seed(11)
    for seed in range(1000):
        x = torch.rand(3, 32, 32, generator=generator)
        lam = torch.rand(1, generator=generator).item()
        spec = sample_sticker_spec(generator, 32, 32, n_classes=10)
        sticker = render_sticker(spec, 32, 32, seed=seed)
        mask = compute_mask(sticker)

        out = apply_intervention(x, sticker, lam)

        assert torch.equal(out[:, ~mask], x[:, ~mask])
        assert torch.equal(apply_intervention(x, sticker, 1.0), x)
        assert float(out.min()) >= 0.0 and float(out.max()) <= 1.0


# chi-square critical values at p = 0.001, by degrees of freedom
CHI2_CRITICAL = {3: 16.27, 9: 27.88}


@pytest.mark.parametrize(
    ("label_fn", "n_labels"),
    [(assign_location_label, 4), (assign_rotation_label, 4), (assign_class_label, 10)],
)
def test_labels_of_random_stickers_are_uniform(label_fn, n_labels):
    generator = torch.Generator().manual_seed(21)
    labels = [label_fn(sample_sticker_spec(generator, 48, 48, n_classes=10)) for _ in range(4000)]

    counts = np.bincount(labels, minlength=n_labels)
    expected = len(labels) / n_labels
    chi2 = float(((counts - expected) ** 2 / expected).sum())

    assert len(counts) == n_labels
    assert chi2 < CHI2_CRITICAL[n_labels - 1]


def test_upright_stickers_share_every_other_draw():
    rotated = sample_sticker_spec(torch.Generator().manual_seed(5), 48, 48, n_classes=10)
    upright = sample_sticker_spec(torch.Generator().manual_seed(5), 48, 48, n_classes=10, rotate=False)

    assert upright.rotation_class == 0
    assert upright.model_dump(exclude={"rotation_class"}) == rotated.model_dump(exclude={"rotation_class"})


def test_sticker_colours_are_at_full_brightness():
    generator = torch.Generator().manual_seed(2)
    for _ in range(50):
        assert max(sample_sticker_spec(generator, 32, 32, n_classes=10).color) == pytest.approx(1.0)


@pytest.mark.parametrize("task", ["sticker-loc", "sticker-rot", "sticker-clsf"])
def test_only_the_rotation_task_rotates_glyphs(source, task):
    rotations = {s.sticker["rotation_class"] for s in build_sticker_dataset(source, task, seed=0)}

    assert task_rotates_glyph(task) == (task == "sticker-rot")
    assert rotations == ({0, 1, 2, 3} if task == "sticker-rot" else {0})
