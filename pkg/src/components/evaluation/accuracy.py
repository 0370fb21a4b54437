from typing import Sequence, Tuple

import numpy as np

from src.components.data.batching import EncodedSplit, iterate_batches
from src.components.models.base import TextClassifier


def predict_split(model: TextClassifier, split: EncodedSplit, batch_size: int = 50) -> np.ndarray:
    predictions = [model.predict(batch) for batch in iterate_batches(split, batch_size)]
    return np.concatenate(predictions) if predictions else np.zeros(0, dtype=np.int64)


def evaluate_accuracy(model: TextClassifier, split: EncodedSplit, batch_size: int = 50) -> float:
    """Fraction of texts whose argmax category (lowest index on ties, dropout off) is the gold one."""
    if len(split) == 0:
        raise ValueError("cannot evaluate accuracy on an empty split")
    return float(np.mean(predict_split(model, split, batch_size) == split.labels))


def summarize_runs(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation, as reported over repeated seeds."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("no runs to summarize")
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return float(values.mean()), std
