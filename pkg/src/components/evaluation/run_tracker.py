from dataclasses import asdict, dataclass, field
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from src.components.training.trainer import EpochRecord

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "train_loss", "dev_accuracy", "best_dev_accuracy"]


@dataclass
class RunMetrics:
    run_name: str
    dataset: str
    model: str
    seed: int
    dev_accuracy: float
    test_accuracy: float
    best_epoch: int
    epochs: int
    stopped_early: bool
    config: Dict[str, Any] = field(default_factory=dict)
    history: List[Dict[str, Any]] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)


class RunTracker:
    """
    Collects the per-epoch records of one training run and writes them next to the
    final metrics: `<run>.metrics.json` and a tab-separated `<run>.history.tsv`.
    Nothing time-dependent is written, so identical runs give identical files.
    """

    def __init__(self, report_dir: Path, run_name: str):
        self.report_dir = Path(report_dir)
        self.run_name = run_name
        self.records: List[EpochRecord] = []

    @property
    def metrics_path(self) -> Path:
        return self.report_dir / f"{self.run_name}.metrics.json"

    @property
    def history_path(self) -> Path:
        return self.report_dir / f"{self.run_name}.history.tsv"

    def log_epoch(self, record: EpochRecord) -> None:
        self.records.append(record)

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame([record.to_dict() for record in self.records], columns=HISTORY_COLUMNS + ["improved"])

    def end_run(self, metrics: RunMetrics) -> Path:
        self.report_dir.mkdir(parents=True, exist_ok=True)
        metrics.history = [record.to_dict() for record in self.records]
        self.metrics_path.write_text(json.dumps(asdict(metrics), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.history_frame()[HISTORY_COLUMNS].to_csv(
            self.history_path, sep="\t", index=False, float_format="%.6f", lineterminator="\n"
        )
        logger.info(
            f"Run {self.run_name}: dev accuracy {metrics.dev_accuracy:.4f}, test accuracy {metrics.test_accuracy:.4f}; "
            f"metrics written to {self.metrics_path}"
        )
        return self.metrics_path


def read_metrics(path: Path) -> Optional[Dict[str, Any]]:
    path = Path(path)
    if not path.is_file():
        return None
    return json.loads(path.read_text(encoding="utf-8"))
