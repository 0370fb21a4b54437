"""
Bag-of-latent-features head.

Each context vector is mapped by one shared linear-softmax layer to a distribution
over d latent features; the distributions are summed over the text and truncated at
1, giving a soft indicator per feature. The text vector is the ReLU of the
indicator-weighted sum of feature vectors.
"""
from dataclasses import dataclass
import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

from src.components.encoders.base import EncodedSequence, Encoder
from src.components.models.base import Batch, LinearHead, TextClassifier
from src.core.errors import DimensionError
from src.core.ops import add, clamp_max_one, dropout, matmul, relu, softmax_rows, stack, sum_rows
from src.core.tensor import Tensor, parameter

logger = logging.getLogger(__name__)


@dataclass
class BolfParams:
    lsl_weight: Tensor  # [d_enc, d]
    lsl_bias: Tensor  # [d]
    feature_table: Tensor  # [d, d_s]
    classifier: LinearHead  # [d_s, m]

    @classmethod
    def create(cls, d_enc: int, d: int, d_s: int, num_categories: int, rng: np.random.Generator, dtype) -> "BolfParams":
        lsl_bound = math.sqrt(1.0 / d_enc)
        feature_bound = math.sqrt(1.0 / d)
        return cls(
            lsl_weight=parameter(rng.uniform(-lsl_bound, lsl_bound, (d_enc, d)), dtype=dtype),
            lsl_bias=parameter(rng.uniform(-lsl_bound, lsl_bound, d), dtype=dtype),
            feature_table=parameter(rng.uniform(-feature_bound, feature_bound, (d, d_s)), dtype=dtype),
            classifier=LinearHead.create(d_s, num_categories, rng, dtype),
        )

    @property
    def d(self) -> int:
        return self.feature_table.shape[0]

    @property
    def d_s(self) -> int:
        return self.feature_table.shape[1]


@dataclass
class LatentDistribution:
    u: Tensor  # [n, d] or [B, L, d]; rows are p(f | w_i, s)
    mask: Optional[np.ndarray] = None


@dataclass
class BagVector:
    r: Tensor  # [d] or [B, d], entries in [0, 1]


@dataclass
class BolfOutput:
    logits: Tensor  # [B, m]
    u: List[np.ndarray]  # one [n_i, d] array per text
    r: np.ndarray  # [B, d]


def latent_distributions(seq: EncodedSequence, params: BolfParams) -> LatentDistribution:
    if seq.d_enc != params.lsl_weight.shape[0]:
        raise DimensionError(
            f"encoder width {seq.d_enc} does not match latent-feature layer input {params.lsl_weight.shape}"
        )
    u = softmax_rows(add(matmul(seq.vectors, params.lsl_weight), params.lsl_bias))
    return LatentDistribution(u=u, mask=seq.mask())


def truncated_sum(dist: LatentDistribution) -> BagVector:
    if dist.u.shape[-2] == 0:
        raise DimensionError("truncated_sum needs at least one position")
    return BagVector(r=clamp_max_one(sum_rows(dist.u, mask=dist.mask)))


def compose_text_vector(
    bag: BagVector,
    params: BolfParams,
    dropout_rate: float = 0.0,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    s = relu(matmul(bag.r, params.feature_table))
    return dropout(s, dropout_rate, rng, training)


def classify(s_vec: Tensor, params: BolfParams) -> Tensor:
    """p(c | s) from the text vector."""
    return softmax_rows(params.classifier(s_vec))


class DolfinClassifier(TextClassifier):
    def __init__(
        self,
        embedding: Tensor,
        encoder: Encoder,
        num_categories: int,
        d: int,
        d_s: int,
        dropout: float,
        rng: np.random.Generator,
    ):
        super().__init__(embedding, encoder, num_categories, dropout)
        self.architecture = f"dolfin-{encoder.kind}"
        self.params = BolfParams.create(encoder.output_width, d, d_s, num_categories, rng, embedding.dtype)

    @property
    def d(self) -> int:
        return self.params.d

    def head_parameters(self) -> Dict[str, Tensor]:
        return {
            "lsl.weight": self.params.lsl_weight,
            "lsl.bias": self.params.lsl_bias,
            "features": self.params.feature_table,
            "classifier.weight": self.params.classifier.weight,
            "classifier.bias": self.params.classifier.bias,
        }

    def dimensions(self) -> Dict[str, Any]:
        return {"d": self.params.d, "d_s": self.params.d_s}

    def _head(self, seq: EncodedSequence, training: bool, rng: Optional[np.random.Generator]):
        dist = latent_distributions(seq, self.params)
        bag = truncated_sum(dist)
        s_vec = compose_text_vector(bag, self.params, self.dropout, training, rng)
        return dist, bag, self.params.classifier(s_vec)

    def run(self, batch: Batch, training: bool = False, rng: Optional[np.random.Generator] = None) -> BolfOutput:
        embedded = self.embed(batch)
        if self.encoder.kind == "conv":
            seq = self.encoder.encode(embedded, lengths=batch.lengths)
            dist, bag, logits = self._head(seq, training, rng)
            u = [dist.u.data[i, : int(n)] for i, n in enumerate(batch.lengths)]
            return BolfOutput(logits=logits, u=u, r=bag.r.data)
        results = [self._head(self.encoder.encode(x), training, rng) for x in self.texts(embedded, batch)]
        return BolfOutput(
            logits=stack([logits for _, _, logits in results]),
            u=[dist.u.data for dist, _, _ in results],
            r=np.stack([bag.r.data for _, bag, _ in results]),
        )

    def logits(self, batch: Batch, training: bool = False, rng: Optional[np.random.Generator] = None) -> Tensor:
        return self.run(batch, training, rng).logits
