from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from src.core.tensor import Tensor


@dataclass
class EncodedSequence:
    """Per-position context vectors `[n, d_enc]`, or `[B, L, d_enc]` with `lengths` for a padded batch."""

    vectors: Tensor
    d_enc: int
    kind: str
    lengths: Optional[np.ndarray] = None
    hidden: Optional[int] = None

    @property
    def length(self) -> int:
        return self.vectors.shape[-2]

    def mask(self) -> Optional[np.ndarray]:
        if self.lengths is None:
            return None
        positions = np.arange(self.length)
        return positions[None, :] < self.lengths[:, None]


class Encoder(ABC):
    kind: str = ""

    @abstractmethod
    def encode(self, x: Tensor, lengths: Optional[np.ndarray] = None) -> EncodedSequence:
        """Map embedded tokens to one context vector per position."""

    @abstractmethod
    def parameters(self) -> Dict[str, Tensor]:
        """Trainable tensors in declaration order."""

    @property
    @abstractmethod
    def output_width(self) -> int:
        pass
