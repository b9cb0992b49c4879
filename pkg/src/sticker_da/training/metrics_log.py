import json
import logging
from pathlib import Path

from pydantic import BaseModel

logger = logging.getLogger(__name__)


class MetricRecord(BaseModel):
    step: int
    phase: str
    metric: str
    value: float


class MetricsLogger:
    """Collects metric records in memory and appends them to a JSON-lines file when one is given."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.records: list[MetricRecord] = []
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def log(self, step: int, phase: str, metric: str, value: float) -> MetricRecord:
        record = MetricRecord(step=step, phase=phase, metric=metric, value=float(value))
        self.records.append(record)
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(record.model_dump_json() + "\n")
        return record

    def series(self, phase: str, metric: str) -> list[float]:
        return [r.value for r in self.records if r.phase == phase and r.metric == metric]


def read_metrics(path: str | Path) -> list[MetricRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                records.append(MetricRecord.model_validate(json.loads(line)))
    return records
