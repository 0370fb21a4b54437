from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from src.components.data.datasets import Example
from src.components.data.vocab import PAD_INDEX, Vocab
from src.components.models.base import Batch


@dataclass
class EncodedSplit:
    ids: List[np.ndarray]
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)


def encode_split(examples: Sequence[Example], vocab: Vocab) -> EncodedSplit:
    return EncodedSplit(
        ids=[vocab.encode(e.tokens) for e in examples],
        labels=np.array([e.label for e in examples], dtype=np.int64),
    )


def make_batch(ids: Sequence[np.ndarray], labels: Optional[np.ndarray] = None) -> Batch:
    """Right-pad the texts with the padding index up to the longest one."""
    lengths = np.array([len(x) for x in ids], dtype=np.int64)
    if len(ids) == 0 or lengths.min() < 1:
        raise ValueError("a batch needs at least one non-empty text")
    padded = np.full((len(ids), int(lengths.max())), PAD_INDEX, dtype=np.int64)
    for row, x in enumerate(ids):
        padded[row, : len(x)] = x
    return Batch(ids=padded, lengths=lengths, labels=labels)


def iterate_batches(split: EncodedSplit, batch_size: int, order: Optional[np.ndarray] = None) -> Iterator[Batch]:
    order = np.arange(len(split)) if order is None else order
    for start in range(0, len(order), batch_size):
        chosen = order[start:start + batch_size]
        yield make_batch([split.ids[i] for i in chosen], split.labels[chosen])
