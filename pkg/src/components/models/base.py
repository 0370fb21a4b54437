from abc import ABC, abstractmethod
from dataclasses import dataclass
import math
from typing import Any, Dict, List, Optional

import numpy as np

from src.components.encoders.base import Encoder
from src.core.ops import add, embedding_lookup, matmul, softmax_rows, take
from src.core.tensor import Tensor, parameter


@dataclass
class Batch:
    ids: np.ndarray  # [B, L], 0 is padding
    lengths: np.ndarray  # [B]
    labels: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return int(self.ids.shape[0])


@dataclass
class LinearHead:
    weight: Tensor
    bias: Tensor

    @classmethod
    def create(cls, fan_in: int, fan_out: int, rng: np.random.Generator, dtype) -> "LinearHead":
        bound = math.sqrt(1.0 / fan_in)
        return cls(
            weight=parameter(rng.uniform(-bound, bound, (fan_in, fan_out)), dtype=dtype),
            bias=parameter(rng.uniform(-bound, bound, fan_out), dtype=dtype),
        )

    def __call__(self, x: Tensor) -> Tensor:
        return add(matmul(x, self.weight), self.bias)


class TextClassifier(ABC):
    """Embedding table + encoder + head; `logits` returns `[B, m]` for a padded batch."""

    architecture: str = ""

    def __init__(self, embedding: Tensor, encoder: Encoder, num_categories: int, dropout: float):
        self.embedding = embedding
        self.encoder = encoder
        self.num_categories = num_categories
        self.dropout = dropout

    @abstractmethod
    def head_parameters(self) -> Dict[str, Tensor]:
        pass

    @abstractmethod
    def logits(self, batch: Batch, training: bool = False, rng: Optional[np.random.Generator] = None) -> Tensor:
        pass

    @abstractmethod
    def dimensions(self) -> Dict[str, Any]:
        """Sizes needed to rebuild the model, stored in checkpoint headers."""

    def parameters(self) -> Dict[str, Tensor]:
        params = {"embedding": self.embedding}
        params.update(self.encoder.parameters())
        params.update(self.head_parameters())
        return params

    def zero_grad(self) -> None:
        for p in self.parameters().values():
            p.zero_grad()

    @property
    def dtype(self) -> np.dtype:
        return self.embedding.dtype

    def embed(self, batch: Batch) -> Tensor:
        return embedding_lookup(self.embedding, batch.ids)

    def texts(self, embedded: Tensor, batch: Batch) -> List[Tensor]:
        """Unpadded `[n, d_w]` slices of a batch, for encoders that run one text at a time."""
        return [take(embedded, (i, slice(0, int(n)))) for i, n in enumerate(batch.lengths)]

    def predict_proba(self, batch: Batch) -> np.ndarray:
        return softmax_rows(self.logits(batch, training=False)).data

    def predict(self, batch: Batch) -> np.ndarray:
        # argmax keeps the lowest category index on ties
        return np.argmax(self.logits(batch, training=False).data, axis=-1)
