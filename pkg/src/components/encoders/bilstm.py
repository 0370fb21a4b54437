from typing import Dict, List, Optional

import numpy as np

from src.components.encoders.base import EncodedSequence, Encoder
from src.config.models import EncoderConfig
from src.core.errors import DimensionError
from src.core.ops import add, concat, lstm_gates, matmul, stack, take
from src.core.tensor import Tensor, constant, parameter

INIT_RANGE = 0.1


class _Direction:
    def __init__(self, input_width: int, hidden: int, rng: np.random.Generator, dtype):
        self.hidden = hidden
        self.weight_ih = parameter(rng.uniform(-INIT_RANGE, INIT_RANGE, (input_width, 4 * hidden)), dtype=dtype)
        self.weight_hh = parameter(rng.uniform(-INIT_RANGE, INIT_RANGE, (hidden, 4 * hidden)), dtype=dtype)
        bias = rng.uniform(-INIT_RANGE, INIT_RANGE, 4 * hidden)
        bias[hidden:2 * hidden] = 1.0  # forget gate
        self.bias = parameter(bias, dtype=dtype)

    def run(self, x: Tensor, reverse: bool) -> List[Tensor]:
        n = x.shape[0]
        # input projections for all positions in one product
        projected = add(matmul(x, self.weight_ih), self.bias)
        h = constant(np.zeros(self.hidden, dtype=x.dtype))
        c = constant(np.zeros(self.hidden, dtype=x.dtype))
        states: List[Optional[Tensor]] = [None] * n
        steps = range(n - 1, -1, -1) if reverse else range(n)
        for t in steps:
            z = add(take(projected, t), matmul(h, self.weight_hh))
            h, c = lstm_gates(z, c)
            states[t] = h
        return states


class BiLSTMEncoder(Encoder):
    """Single-layer bidirectional LSTM; position i holds `[forward_i | backward_i]`."""

    kind = "bilstm"

    def __init__(self, input_width: int, cfg: EncoderConfig, rng: np.random.Generator, dtype=np.float32):
        self.input_width = input_width
        self.hidden = cfg.lstm_hidden
        self.forward_cell = _Direction(input_width, self.hidden, rng, dtype)
        self.backward_cell = _Direction(input_width, self.hidden, rng, dtype)

    @property
    def output_width(self) -> int:
        return 2 * self.hidden

    def parameters(self) -> Dict[str, Tensor]:
        params = {}
        for name, direction in (("forward", self.forward_cell), ("backward", self.backward_cell)):
            params[f"lstm.{name}.weight_ih"] = direction.weight_ih
            params[f"lstm.{name}.weight_hh"] = direction.weight_hh
            params[f"lstm.{name}.bias"] = direction.bias
        return params

    def encode(self, x: Tensor, lengths: Optional[np.ndarray] = None) -> EncodedSequence:
        if x.ndim != 2:
            raise DimensionError(f"bilstm encoder runs one text at a time, got input {x.shape}")
        if x.shape[0] == 0:
            raise DimensionError("bilstm encoder: empty sequence")
        if x.shape[1] != self.input_width:
            raise DimensionError(f"bilstm encoder expects width {self.input_width}, got input {x.shape}")
        forward_states = self.forward_cell.run(x, reverse=False)
        backward_states = self.backward_cell.run(x, reverse=True)
        vectors = concat([stack(forward_states), stack(backward_states)], axis=-1)
        return EncodedSequence(vectors=vectors, d_enc=self.output_width, kind=self.kind, hidden=self.hidden)


def bilstm_endpoints(seq: EncodedSequence) -> Tensor:
    """Backward half of the first position followed by the forward half of the last position."""
    if seq.kind != BiLSTMEncoder.kind or seq.hidden is None:
        raise ValueError(f"bilstm_endpoints needs a bilstm encoding, got a {seq.kind} encoding")
    if seq.vectors.ndim != 2:
        raise DimensionError(f"bilstm_endpoints needs a single text, got {seq.vectors.shape}")
    hidden = seq.hidden
    last = seq.length - 1
    backward_first = take(seq.vectors, (0, slice(hidden, 2 * hidden)))
    forward_last = take(seq.vectors, (last, slice(0, hidden)))
    return concat([backward_first, forward_last], axis=-1)
