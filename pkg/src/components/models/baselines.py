from typing import Any, Dict, Optional

import numpy as np

from src.components.encoders.bilstm import BiLSTMEncoder, bilstm_endpoints
from src.components.encoders.conv import ConvEncoder
from src.components.models.base import Batch, LinearHead, TextClassifier
from src.core.ops import dropout, maxpool_over_time, softmax_rows, stack
from src.core.tensor import Tensor


def cnn_logits(
    x: Tensor,
    encoder: ConvEncoder,
    head: LinearHead,
    lengths: Optional[np.ndarray] = None,
    dropout_rate: float = 0.0,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    seq = encoder.encode(x, lengths=lengths)
    pooled = maxpool_over_time(seq.vectors, lengths=lengths)
    return head(dropout(pooled, dropout_rate, rng, training))


def cnn_forward(x: Tensor, encoder: ConvEncoder, head: LinearHead, **kwargs) -> Tensor:
    """Max-over-time pooled convolution features through a linear-softmax layer."""
    return softmax_rows(cnn_logits(x, encoder, head, **kwargs))


def bilstm_logits(
    x: Tensor,
    encoder: BiLSTMEncoder,
    head: LinearHead,
    dropout_rate: float = 0.0,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    endpoints = bilstm_endpoints(encoder.encode(x))
    return head(dropout(endpoints, dropout_rate, rng, training))


def bilstm_forward(x: Tensor, encoder: BiLSTMEncoder, head: LinearHead, **kwargs) -> Tensor:
    return softmax_rows(bilstm_logits(x, encoder, head, **kwargs))


class CNNClassifier(TextClassifier):
    architecture = "cnn"

    def __init__(
        self, embedding: Tensor, encoder: ConvEncoder, num_categories: int, dropout: float, rng: np.random.Generator
    ):
        super().__init__(embedding, encoder, num_categories, dropout)
        self.head = LinearHead.create(encoder.output_width, num_categories, rng, embedding.dtype)

    def head_parameters(self) -> Dict[str, Tensor]:
        return {"classifier.weight": self.head.weight, "classifier.bias": self.head.bias}

    def dimensions(self) -> Dict[str, Any]:
        return {"d_s": self.encoder.output_width}

    def logits(self, batch: Batch, training: bool = False, rng: Optional[np.random.Generator] = None) -> Tensor:
        return cnn_logits(
            self.embed(batch), self.encoder, self.head, batch.lengths, self.dropout, training, rng
        )


class BiLSTMClassifier(TextClassifier):
    architecture = "bilstm"

    def __init__(
        self, embedding: Tensor, encoder: BiLSTMEncoder, num_categories: int, dropout: float, rng: np.random.Generator
    ):
        super().__init__(embedding, encoder, num_categories, dropout)
        self.head = LinearHead.create(encoder.output_width, num_categories, rng, embedding.dtype)

    def head_parameters(self) -> Dict[str, Tensor]:
        return {"classifier.weight": self.head.weight, "classifier.bias": self.head.bias}

    def dimensions(self) -> Dict[str, Any]:
        return {"d_s": self.encoder.output_width}

    def logits(self, batch: Batch, training: bool = False, rng: Optional[np.random.Generator] = None) -> Tensor:
        embedded = self.embed(batch)
        return stack([
            bilstm_logits(x, self.encoder, self.head, self.dropout, training, rng)
            for x in self.texts(embedded, batch)
        ])
