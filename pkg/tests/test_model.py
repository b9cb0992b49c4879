import pytest
import torch

from sticker_da.core import CheckpointMismatchError, ConfigError, NumericError
from sticker_da.core.settings import ModelSettings
from sticker_da.data import iterate_batches
from sticker_da.model import (
    build_model,
    config_fingerprint,
    forward_all,
    forward_goal,
    forward_subsidiary,
    load_model,
    read_checkpoint,
    save_checkpoint,
    warm_start_backbone,
)


def _states_equal(a, b) -> bool:
    sa, sb = a.state_dict(), b.state_dict()
    return sa.keys() == sb.keys() and all(torch.equal(sa[k], sb[k]) for k in sa)


def test_output_widths(tiny_model, source):
    batch = next(iterate_batches(source, 4, seed=0))
    z, goal, subsidiary = forward_all(tiny_model, batch)
    assert z.shape == (4, 8)
    assert goal.shape == (4, 4)
    assert subsidiary.shape == (4, 11)
    assert tiny_model.goal_classes == 4
    assert tiny_model.sticker_classes == 10


def test_build_is_deterministic(tiny_arch):
    a = build_model(tiny_arch, 4, 10, seed=3)
    b = build_model(tiny_arch, 4, 10, seed=3)
    c = build_model(tiny_arch, 4, 10, seed=4)
    assert _states_equal(a, b)
    assert not _states_equal(a, c)


def test_build_does_not_touch_the_global_rng(tiny_arch):
    torch.manual_seed(0)
    expected = torch.rand(1)
    torch.manual_seed(0)
    build_model(tiny_arch, 4, 10, seed=9)
    assert torch.equal(torch.rand(1), expected)


def test_zero_input_gives_finite_probabilities(tiny_model):
    tiny_model.eval()
    probs = forward_goal(tiny_model, torch.zeros(2, 3, 32, 32)).softmax(1)
    assert torch.isfinite(probs).all()
    torch.testing.assert_close(probs.sum(1), torch.ones(2))


def test_duplicated_rows_give_identical_outputs(tiny_model):
    tiny_model.eval()
    x = torch.rand(1, 3, 32, 32).repeat(3, 1, 1, 1)
    out = forward_subsidiary(tiny_model, x)
    torch.testing.assert_close(out[1], out[0])
    torch.testing.assert_close(out[2], out[0])


def test_non_finite_input_raises(tiny_model):
    tiny_model.eval()
    x = torch.full((2, 3, 32, 32), float("nan"))
    with pytest.raises(NumericError):
        forward_goal(tiny_model, x)


def test_set_frozen_controls_gradients_and_mode(tiny_model):
    tiny_model.set_frozen({"h", "f_g"})
    tiny_model.train()

    assert not any(p.requires_grad for p in tiny_model.backbone.parameters())
    assert not any(p.requires_grad for p in tiny_model.goal_head.parameters())
    assert all(p.requires_grad for p in tiny_model.subsidiary_head.parameters())
    assert not tiny_model.backbone.training and not tiny_model.goal_head.training
    assert tiny_model.subsidiary_head.training


def test_checksums_track_changes(tiny_model):
    before = tiny_model.checksums()
    with torch.no_grad():
        next(tiny_model.goal_head.parameters()).add_(1.0)
    after = tiny_model.checksums()
    assert [name for name in before if before[name] != after[name]] == ["f_g"]


def test_invalid_architecture(tiny_arch, tiny_model):
    with pytest.raises(ConfigError):
        build_model(tiny_arch, goal_classes=1, sticker_classes=10, seed=0)
    with pytest.raises(ConfigError):
        tiny_model.component("g")


def test_checkpoint_round_trip(tmp_path, tiny_arch, tiny_model):
    fingerprint = config_fingerprint(tiny_arch, 4, 10)
    path = save_checkpoint(tmp_path / "source_goal.pt", tiny_model, "source_goal", fingerprint, extra={"seed": 0})

    restored, checkpoint = load_model(path, tiny_arch, fingerprint)

    assert checkpoint.phase == "source_goal"
    assert checkpoint.extra == {"seed": 0}
    assert _states_equal(restored, tiny_model)
    tiny_model.eval()
    x = torch.rand(4, 3, 32, 32)
    assert torch.equal(forward_goal(restored, x), forward_goal(tiny_model, x))


def test_checkpoint_fingerprint_mismatch(tmp_path, tiny_arch, tiny_model):
    path = save_checkpoint(tmp_path / "ckpt.pt", tiny_model, "adapted", config_fingerprint(tiny_arch, 4, 10))
    other_arch = ModelSettings(channels=[4, 8, 16], feature_dim=8, bottleneck_dim=8)
    with pytest.raises(CheckpointMismatchError):
        read_checkpoint(path, config_fingerprint(other_arch, 4, 10))
    with pytest.raises(CheckpointMismatchError):
        read_checkpoint(path, config_fingerprint(tiny_arch, 4, 4))


def test_fingerprint_ignores_warm_start(tiny_arch, tmp_path):
    warm = tiny_arch.model_copy(update={"warm_start": tmp_path / "x.pt"})
    assert config_fingerprint(warm, 4, 10) == config_fingerprint(tiny_arch, 4, 10)


def test_warm_start_copies_the_backbone(tmp_path, tiny_arch, tiny_model):
    path = save_checkpoint(tmp_path / "donor.pt", tiny_model, "source_goal", "any")
    m = build_model(tiny_arch, 4, 4, seed=7)
    warm_start_backbone(m, path)
    donor = tiny_model.backbone.state_dict()
    assert all(torch.equal(v, donor[k]) for k, v in m.backbone.state_dict().items())

    wider = build_model(ModelSettings(channels=[4, 8, 16], feature_dim=8, bottleneck_dim=8), 4, 4, seed=0)
    with pytest.raises(CheckpointMismatchError):
        warm_start_backbone(wider, path)
