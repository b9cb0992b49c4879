import logging
from collections.abc import Sequence

import torch
import torch.nn.functional as F

from sticker_da.core.exceptions import MemoryBankError

logger = logging.getLogger(__name__)


class MemoryBank:
    """
    Row-normalized N×d store of target features, one row per sample id of D_t ∪ D_{t,n}.
    Rows are written with detached features; `initialized` holds once every row has
    been written at least once.
    """

    def __init__(
        self,
        ids: Sequence[str],
        dim: int,
        temperature: float = 0.05,
        dtype: torch.dtype = torch.float32,
        device: torch.device | str = "cpu",
    ):
        if temperature <= 0:
            raise MemoryBankError(f"temperature must be positive, got {temperature}")
        self.index = {sample_id: row for row, sample_id in enumerate(ids)}
        if len(self.index) != len(ids):
            raise MemoryBankError("memory bank ids must be unique")
        self.ids = list(ids)
        self.temperature = temperature
        self.features = torch.zeros(len(ids), dim, dtype=dtype, device=device)
        self.write_counts = torch.zeros(len(ids), dtype=torch.long)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def initialized(self) -> bool:
        return bool(len(self)) and bool((self.write_counts > 0).all())

    @classmethod
    def from_features(cls, ids: Sequence[str], features: torch.Tensor, temperature: float = 0.05) -> "MemoryBank":
        bank = cls(ids, features.shape[1], temperature, dtype=features.dtype, device=features.device)
        bank.update(features, ids)
        return bank

    def rows(self, ids: Sequence[str]) -> torch.Tensor:
        try:
            rows = [self.index[i] for i in ids]
        except KeyError as e:
            raise MemoryBankError(f"id {e.args[0]} is not registered in the memory bank") from e
        return torch.tensor(rows, dtype=torch.long, device=self.features.device)

    def update(self, features: torch.Tensor, ids: Sequence[str]):
        """Overwrite the rows of `ids` with L2-normalized, detached `features`."""
        if features.shape[0] != len(ids):
            raise MemoryBankError(f"{features.shape[0]} feature rows for {len(ids)} ids")
        rows = self.rows(ids)
        with torch.no_grad():
            self.features[rows] = F.normalize(features.detach().to(self.features), dim=1)
        self.write_counts[rows.cpu()] += 1


def update_bank(bank: MemoryBank, batch_features: torch.Tensor, batch_ids: Sequence[str]):
    bank.update(batch_features, batch_ids)
