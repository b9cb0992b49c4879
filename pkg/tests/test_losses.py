import math

import pytest
import torch
import torch.nn.functional as F
from torch.autograd import gradcheck

from sticker_da.core import LossInputError, MemoryBankError
from sticker_da.data import iterate_batches
from sticker_da.losses import (
    MemoryBank,
    ce_label_smoothed,
    loss_diversity,
    loss_oos,
    loss_self_training,
    loss_subsidiary,
    loss_subsidiary_target,
    mean_prediction,
    neighbor_probs,
    update_bank,
)

E0 = torch.tensor([1.0, 0.0, 0.0])


def test_label_smoothed_ce_on_uniform_logits():
    loss = ce_label_smoothed(torch.zeros(1, 2), torch.tensor([0]), smoothing=0.1)
    assert loss.item() == pytest.approx(math.log(2))


def test_unsmoothed_ce_on_a_confident_correct_prediction():
    loss = ce_label_smoothed(torch.tensor([[0.0, 50.0]]), torch.tensor([1]), smoothing=0.0)
    assert loss.item() < 1e-6


def test_label_smoothing_spreads_mass_over_wrong_classes():
    logits = torch.tensor([[1.0, -0.5, 2.0]])
    log_p = F.log_softmax(logits, dim=1)[0]
    expected = -(0.8 * log_p[1] + 0.1 * log_p[0] + 0.1 * log_p[2])
    assert ce_label_smoothed(logits, torch.tensor([1]), smoothing=0.2).item() == pytest.approx(expected.item())


def test_ce_rejects_bad_inputs():
    with pytest.raises(LossInputError):
        ce_label_smoothed(torch.zeros(1, 2), torch.tensor([0]), smoothing=1.0)
    with pytest.raises(LossInputError):
        ce_label_smoothed(torch.zeros(1, 2), torch.tensor([2]))
    with pytest.raises(LossInputError):
        ce_label_smoothed(torch.zeros(1, 1), torch.tensor([0]))


def test_oos_loss_targets_the_last_node():
    logits = torch.randn(5, 11)
    expected = F.cross_entropy(logits, torch.full((5,), 10))
    torch.testing.assert_close(loss_oos(logits), expected)
    torch.testing.assert_close(loss_oos(logits, torch.full((5,), 10)), expected)
    with pytest.raises(LossInputError):
        loss_oos(logits, torch.tensor([10, 10, 3, 10, 10]))


def test_subsidiary_losses_check_label_ranges():
    logits = torch.randn(3, 5)
    torch.testing.assert_close(loss_subsidiary(logits, torch.tensor([0, 4, 2])), F.cross_entropy(logits, torch.tensor([0, 4, 2])))
    with pytest.raises(LossInputError):
        loss_subsidiary(logits, torch.tensor([0, 5, 2]))
    # stickered target samples never carry the OOS label
    with pytest.raises(LossInputError):
        loss_subsidiary_target(logits, torch.tensor([0, 4, 2]))
    torch.testing.assert_close(
        loss_subsidiary_target(logits, torch.tensor([0, 3, 2])), F.cross_entropy(logits, torch.tensor([0, 3, 2]))
    )


def test_single_neighbor_takes_all_the_mass():
    bank = MemoryBank.from_features(["a", "b"], torch.stack([E0, E0]), temperature=1.0)
    assert neighbor_probs(bank, E0, "a").tolist() == [0.0, 1.0]


def test_equidistant_neighbors_share_the_mass():
    bank = MemoryBank.from_features(["a", "b", "c"], torch.eye(3), temperature=1.0)
    p = neighbor_probs(bank, E0, "a")
    assert p[0].item() == 0.0
    torch.testing.assert_close(p[1:], torch.tensor([0.5, 0.5]))
    assert loss_self_training(bank, E0[None], ["a"]).item() == pytest.approx(math.log(2))


def test_low_temperature_concentrates_on_the_nearest_neighbor():
    rows = torch.tensor([[1.0, 0.0, 0.0], [0.9, math.sqrt(1 - 0.81), 0.0], [0.4, 0.0, math.sqrt(1 - 0.16)]])
    bank = MemoryBank.from_features(["a", "b", "c"], rows, temperature=0.01)
    p = neighbor_probs(bank, E0, "a")
    assert p.argmax().item() == 1
    assert p[1].item() >= 0.99


def test_neighbor_probs_are_a_distribution_without_self():
    feats = F.normalize(torch.randn(6, 4, generator=torch.Generator().manual_seed(0)), dim=1)
    bank = MemoryBank.from_features([str(i) for i in range(6)], feats)
    for i in range(6):
        p = neighbor_probs(bank, feats[i], str(i))
        assert p[i].item() == 0.0
        assert p.sum().item() == pytest.approx(1.0, abs=1e-6)


def test_neighbor_probs_input_checks():
    bank = MemoryBank.from_features(["a", "b"], torch.stack([E0, E0]))
    with pytest.raises(LossInputError):
        neighbor_probs(bank, 2 * E0, "a")
    with pytest.raises(MemoryBankError):
        neighbor_probs(bank, E0, "z")
    with pytest.raises(MemoryBankError):
        neighbor_probs(MemoryBank.from_features(["a"], E0[None]), E0, "a")


def test_update_bank_writes_normalized_detached_rows():
    bank = MemoryBank([str(i) for i in range(4)], dim=3)
    written = torch.tensor([[3.0, 4.0, 0.0]], requires_grad=True)

    update_bank(bank, written, ["2"])

    assert F.cosine_similarity(bank.features[2], written[0].detach(), dim=0).item() == pytest.approx(1.0)
    assert bank.features[2].norm().item() == pytest.approx(1.0)
    assert not bank.features.requires_grad
    assert torch.equal(bank.features[[0, 1, 3]], torch.zeros(3, 3))
    assert bank.write_counts.tolist() == [0, 0, 1, 0]
    assert not bank.initialized


def test_one_epoch_writes_every_row_once(toy_dataset):
    ds = toy_dataset(10)
    bank = MemoryBank(ds.ids, dim=5)
    for batch in iterate_batches(ds, 4, seed=0):
        update_bank(bank, torch.randn(len(batch), 5), batch.ids)
    assert bank.write_counts.tolist() == [1] * 10
    assert bank.initialized


def test_memory_bank_rejects_duplicate_ids_and_bad_temperature():
    with pytest.raises(MemoryBankError):
        MemoryBank(["a", "a"], dim=2)
    with pytest.raises(MemoryBankError):
        MemoryBank(["a", "b"], dim=2, temperature=0.0)


@pytest.mark.parametrize(
    "p_hat, expected",
    [
        (torch.full((4,), 0.25), -math.log(4)),
        (torch.tensor([1.0, 0.0, 0.0]), 0.0),
        (torch.tensor([0.75, 0.25]), -0.5623),
    ],
)
def test_diversity_loss_values(p_hat, expected):
    assert loss_diversity(p_hat, len(p_hat)).item() == pytest.approx(expected, abs=1e-4)


def test_diversity_loss_is_negative_entropy():
    generator = torch.Generator().manual_seed(1)
    for k in (2, 5, 31):
        p_hat = torch.softmax(torch.randn(k, dtype=torch.float64, generator=generator), 0)
        negative_entropy = (p_hat * p_hat.log()).sum()
        assert abs(loss_diversity(p_hat, k).item() - negative_entropy.item()) < 1e-8


def test_diversity_loss_input_checks():
    with pytest.raises(LossInputError):
        loss_diversity(torch.full((3,), 1 / 3), 4)
    with pytest.raises(LossInputError):
        loss_diversity(torch.tensor([0.6, 0.6]), 2)


def test_mean_prediction():
    p_hat = mean_prediction(torch.tensor([[0.0, 0.0], [100.0, 0.0]]))
    torch.testing.assert_close(p_hat, torch.tensor([0.75, 0.25]))


class TestGradients:
    """Central finite differences against autograd, on a 4×3 linear model in float64."""

    @pytest.fixture
    def inputs(self):
        generator = torch.Generator().manual_seed(0)
        x = torch.randn(5, 4, dtype=torch.float64, generator=generator)
        w = torch.randn(4, 3, dtype=torch.float64, generator=generator, requires_grad=True)
        return x, w

    def test_label_smoothed_ce(self, inputs):
        x, w = inputs
        labels = torch.tensor([0, 1, 2, 1, 0])
        assert gradcheck(lambda w: ce_label_smoothed(x @ w, labels, 0.1), (w,))

    def test_subsidiary_and_oos(self, inputs):
        x, w = inputs
        assert gradcheck(lambda w: loss_subsidiary(x @ w, torch.tensor([0, 1, 2, 2, 0])), (w,))
        assert gradcheck(lambda w: loss_oos(x @ w), (w,))
        assert gradcheck(lambda w: loss_subsidiary_target(x @ w, torch.tensor([0, 1, 1, 0, 1])), (w,))

    def test_self_training(self, inputs):
        x, w = inputs
        ids = [str(i) for i in range(8)]
        bank_rows = torch.randn(8, 3, dtype=torch.float64, generator=torch.Generator().manual_seed(1))
        bank = MemoryBank.from_features(ids, bank_rows, temperature=0.5)
        assert gradcheck(lambda w: loss_self_training(bank, x @ w, ids[:5]), (w,))

    def test_diversity(self, inputs):
        x, w = inputs
        assert gradcheck(lambda w: loss_diversity(mean_prediction(x @ w), 3), (w,))
