import math
from typing import Dict, Optional

import numpy as np

from src.components.encoders.base import EncodedSequence, Encoder
from src.config.models import EncoderConfig
from src.core.errors import DimensionError
from src.core.ops import FilterBank, conv1d_temporal, relu
from src.core.tensor import Tensor, parameter


class ConvEncoder(Encoder):
    """
    Same-length temporal convolution followed by ReLU.

    Every filter width is zero-padded so that position i keeps one vector; widths
    of even size put the extra padding on the right (width 4 pads 1 left, 2 right).
    """

    kind = "conv"

    def __init__(self, input_width: int, cfg: EncoderConfig, rng: np.random.Generator, dtype=np.float32):
        self.input_width = input_width
        self.cfg = cfg
        weights, biases = [], []
        for width in cfg.filter_sizes:
            fan_in = width * input_width
            bound = math.sqrt(1.0 / fan_in)
            weights.append(parameter(rng.uniform(-bound, bound, (fan_in, cfg.filters_per_size)), dtype=dtype))
            biases.append(parameter(rng.uniform(-bound, bound, cfg.filters_per_size), dtype=dtype))
        self.bank = FilterBank(tuple(cfg.filter_sizes), weights, biases)

    @property
    def output_width(self) -> int:
        return self.bank.channels

    @property
    def reach(self) -> int:
        """Largest number of neighbours on either side that can influence a position."""
        return max(width - 1 - (width - 1) // 2 for width in self.bank.widths)

    def parameters(self) -> Dict[str, Tensor]:
        params = {}
        for width, weight, bias in zip(self.bank.widths, self.bank.weights, self.bank.biases):
            params[f"conv{width}.weight"] = weight
            params[f"conv{width}.bias"] = bias
        return params

    def encode(self, x: Tensor, lengths: Optional[np.ndarray] = None) -> EncodedSequence:
        if x.shape[-1] != self.input_width:
            raise DimensionError(f"conv encoder expects width {self.input_width}, got input {x.shape}")
        vectors = relu(conv1d_temporal(x, self.bank, pad=True))
        return EncodedSequence(vectors=vectors, d_enc=self.output_width, kind=self.kind, lengths=lengths)
