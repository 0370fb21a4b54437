"""
Differentiable operations used by the encoders, the latent-feature head and the baselines.

Every op works on the last axis (features) and, where it makes sense, on the
second-to-last axis (time), so the same code serves a single text `[n, d]` and a
padded batch `[B, n, d]`. Broadcasting is limited to a trailing-shape operand
such as a bias vector.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.core.errors import DimensionError, NumericError
from src.core.tensor import Function, Tensor

logger = logging.getLogger(__name__)


def _check_trailing(a: np.ndarray, b: np.ndarray, name: str) -> None:
    if a.shape != b.shape and (b.ndim > a.ndim or a.shape[a.ndim - b.ndim:] != b.shape):
        raise DimensionError(f"{name}: shapes {a.shape} and {b.shape} are not compatible")


def _reduce_to(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    return grad.reshape((-1,) + shape).sum(axis=0)


class MatMul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if b.ndim != 2 or a.ndim == 0 or a.shape[-1] != b.shape[0]:
            raise DimensionError(f"matmul: cannot multiply {a.shape} by {b.shape}")
        self.a, self.b = a, b
        return a @ b

    def backward(self, grad: np.ndarray):
        ga = grad @ self.b.T if self.needs_grad[0] else None
        gb = None
        if self.needs_grad[1]:
            q, r = self.b.shape
            gb = self.a.reshape(-1, q).T @ grad.reshape(-1, r)
        return ga, gb


class Add(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_trailing(a, b, "add")
        self.b_shape = b.shape
        return a + b

    def backward(self, grad: np.ndarray):
        return grad, _reduce_to(grad, self.b_shape)


class Mul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_trailing(a, b, "mul")
        self.a, self.b = a, b
        return a * b

    def backward(self, grad: np.ndarray):
        ga = grad * self.b if self.needs_grad[0] else None
        gb = _reduce_to(grad * self.a, self.b.shape) if self.needs_grad[1] else None
        return ga, gb


class Scale(Function):
    def forward(self, a: np.ndarray, factor: float) -> np.ndarray:
        self.factor = factor
        return a * factor

    def backward(self, grad: np.ndarray):
        return (grad * self.factor,)


class MaskScale(Function):
    """Multiply by a fixed array that takes no gradient (dropout masks)."""

    def forward(self, a: np.ndarray, mask: np.ndarray) -> np.ndarray:
        self.mask = mask
        return a * mask

    def backward(self, grad: np.ndarray):
        return (grad * self.mask,)


class SumRows(Function):
    def forward(self, x: np.ndarray, mask: Optional[np.ndarray] = None) -> np.ndarray:
        if x.ndim < 2:
            raise DimensionError(f"sum_rows needs at least two axes, got shape {x.shape}")
        self.x_shape = x.shape
        self.mask = None if mask is None else mask.astype(x.dtype)[..., None]
        if self.mask is not None:
            x = x * self.mask
        return x.sum(axis=-2)

    def backward(self, grad: np.ndarray):
        gx = np.broadcast_to(grad[..., None, :], self.x_shape)
        if self.mask is not None:
            gx = gx * self.mask
        return (np.array(gx),)


class SumAll(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.x_shape = x.shape
        return np.asarray(x.sum())

    def backward(self, grad: np.ndarray):
        return (np.full(self.x_shape, grad, dtype=grad.dtype),)


class Concat(Function):
    def forward(self, *arrays: np.ndarray, axis: int = -1) -> np.ndarray:
        self.axis = axis
        self.sizes = [a.shape[axis] for a in arrays]
        try:
            return np.concatenate(arrays, axis=axis)
        except ValueError as e:
            raise DimensionError(f"concat: incompatible shapes {[a.shape for a in arrays]}") from e

    def backward(self, grad: np.ndarray):
        cuts = np.cumsum(self.sizes)[:-1]
        return tuple(np.split(grad, cuts, axis=self.axis))


class Stack(Function):
    def forward(self, *arrays: np.ndarray) -> np.ndarray:
        try:
            return np.stack(arrays, axis=0)
        except ValueError as e:
            raise DimensionError(f"stack: incompatible shapes {[a.shape for a in arrays]}") from e

    def backward(self, grad: np.ndarray):
        return tuple(grad[i] for i in range(grad.shape[0]))


class Take(Function):
    """Basic (slice and integer) indexing."""

    def forward(self, x: np.ndarray, index=None) -> np.ndarray:
        self.x_shape, self.x_dtype, self.index = x.shape, x.dtype, index
        return np.array(x[index])

    def backward(self, grad: np.ndarray):
        gx = np.zeros(self.x_shape, dtype=self.x_dtype)
        gx[self.index] += grad
        return (gx,)


class EmbeddingLookup(Function):
    def forward(self, table: np.ndarray, ids: np.ndarray = None, padding_idx: Optional[int] = 0) -> np.ndarray:
        ids = np.asarray(ids)
        if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
            raise DimensionError(f"embedding ids outside [0, {table.shape[0]})")
        self.table_shape, self.dtype = table.shape, table.dtype
        self.ids, self.padding_idx = ids, padding_idx
        return table[ids]

    def backward(self, grad: np.ndarray):
        gt = np.zeros(self.table_shape, dtype=self.dtype)
        np.add.at(gt, self.ids.reshape(-1), grad.reshape(-1, self.table_shape[1]))
        if self.padding_idx is not None:
            gt[self.padding_idx] = 0.0
        return (gt,)


class SoftmaxRows(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(x)):
            raise NumericError("softmax_rows received non-finite input")
        z = np.exp(x - x.max(axis=-1, keepdims=True))
        self.y = z / z.sum(axis=-1, keepdims=True)
        return self.y

    def backward(self, grad: np.ndarray):
        y = self.y
        return (y * (grad - (grad * y).sum(axis=-1, keepdims=True)),)


class ReLU(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.gate = (x > 0).astype(x.dtype)
        return x * self.gate

    def backward(self, grad: np.ndarray):
        return (grad * self.gate,)


class ClampMaxOne(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        # the gate stays open at exactly 1
        self.gate = (x <= 1.0).astype(x.dtype)
        return np.minimum(x, 1.0).astype(x.dtype, copy=False)

    def backward(self, grad: np.ndarray):
        return (grad * self.gate,)


class Sigmoid(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.y = 0.5 * (1.0 + np.tanh(0.5 * x))
        return self.y

    def backward(self, grad: np.ndarray):
        return (grad * self.y * (1.0 - self.y),)


class Tanh(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.y = np.tanh(x)
        return self.y

    def backward(self, grad: np.ndarray):
        return (grad * (1.0 - self.y * self.y),)


class Conv1dTemporal(Function):
    """One window width of a temporal convolution over `[..., n, d]`, weight `[width * d, k]`."""

    def forward(
        self, x: np.ndarray, weight: np.ndarray, bias: np.ndarray, width: int = 1, pad: bool = True
    ) -> np.ndarray:
        n, d = x.shape[-2], x.shape[-1]
        if n == 0:
            raise DimensionError("conv1d_temporal: empty sequence")
        if weight.ndim != 2 or weight.shape[0] != width * d or bias.shape != (weight.shape[1],):
            raise DimensionError(
                f"conv1d_temporal: width {width} over input {x.shape} needs weight ({width * d}, k) "
                f"and bias (k,), got {weight.shape} and {bias.shape}"
            )
        if pad:
            left = (width - 1) // 2
            right = width - 1 - left
            widths = [(0, 0)] * (x.ndim - 2) + [(left, right), (0, 0)]
            padded = np.pad(x, widths)
        else:
            left = 0
            padded = x
        n_out = padded.shape[-2] - width + 1
        if n_out < 1:
            raise DimensionError(f"conv1d_temporal: sequence of length {n} shorter than window {width}")
        # windows: [..., n_out, d, width] -> [..., n_out, width * d], window-major
        windows = sliding_window_view(padded, width, axis=-2)
        cols = np.swapaxes(windows, -1, -2).reshape(x.shape[:-2] + (n_out, width * d))
        self.cols, self.weight = cols, weight
        self.width, self.left, self.n, self.d = width, left, n, d
        self.padded_shape = padded.shape
        return cols @ weight + bias

    def backward(self, grad: np.ndarray):
        k = self.weight.shape[1]
        n_out = grad.shape[-2]
        gx = gw = gb = None
        if self.needs_grad[0]:
            gcols = (grad @ self.weight.T).reshape(grad.shape[:-2] + (n_out, self.width, self.d))
            gpadded = np.zeros(self.padded_shape, dtype=grad.dtype)
            for t in range(self.width):
                gpadded[..., t:t + n_out, :] += gcols[..., :, t, :]
            gx = gpadded[..., self.left:self.left + self.n, :]
        if self.needs_grad[1]:
            gw = self.cols.reshape(-1, self.cols.shape[-1]).T @ grad.reshape(-1, k)
        if self.needs_grad[2]:
            gb = grad.reshape(-1, k).sum(axis=0)
        return gx, gw, gb


class MaxPoolOverTime(Function):
    def forward(self, x: np.ndarray, lengths: Optional[np.ndarray] = None) -> np.ndarray:
        if x.ndim < 2 or x.shape[-2] == 0:
            raise DimensionError(f"maxpool_over_time: needs at least one position, got shape {x.shape}")
        scores = x
        if lengths is not None:
            if x.ndim != 3:
                raise DimensionError(f"maxpool_over_time: lengths need a batched [B, n, k] input, got {x.shape}")
            positions = np.arange(x.shape[-2])
            valid = positions[None, :] < np.asarray(lengths)[:, None]
            scores = np.where(valid[..., None], x, -np.inf)
        # np.argmax returns the first maximum, which fixes the tie rule
        self.index = np.expand_dims(np.argmax(scores, axis=-2), -2)
        self.x_shape, self.dtype = x.shape, x.dtype
        return np.take_along_axis(x, self.index, axis=-2).squeeze(-2)

    def backward(self, grad: np.ndarray):
        gx = np.zeros(self.x_shape, dtype=self.dtype)
        np.put_along_axis(gx, self.index, np.expand_dims(grad, -2), axis=-2)
        return (gx,)


class CrossEntropy(Function):
    def forward(self, logits: np.ndarray, gold=None) -> np.ndarray:
        batch = logits.reshape(-1, logits.shape[-1])
        gold = np.asarray(gold).reshape(-1)
        m = batch.shape[1]
        if gold.shape[0] != batch.shape[0]:
            raise DimensionError(f"cross_entropy: {gold.shape[0]} labels for logits of shape {logits.shape}")
        if np.any(gold < 0) or np.any(gold >= m):
            raise DimensionError(f"cross_entropy: gold index outside [0, {m})")
        shifted = batch - batch.max(axis=-1, keepdims=True)
        log_probs = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
        rows = np.arange(batch.shape[0])
        self.log_probs, self.gold, self.rows = log_probs, gold, rows
        self.logits_shape = logits.shape
        return np.asarray(-log_probs[rows, gold].mean(), dtype=logits.dtype)

    def backward(self, grad: np.ndarray):
        g = np.exp(self.log_probs)
        g[self.rows, self.gold] -= 1.0
        g *= grad / self.rows.shape[0]
        return (g.reshape(self.logits_shape),)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return MatMul.apply(a, b)


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return Mul.apply(a, b)


def scale(a: Tensor, factor: float) -> Tensor:
    return Scale.apply(a, factor=float(factor))


def sum_rows(x: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    """Sum over the time axis; `mask` (shape `x.shape[:-1]`) zeroes padded positions."""
    return SumRows.apply(x, mask=mask)


def sum_all(x: Tensor) -> Tensor:
    return SumAll.apply(x)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    return Concat.apply(*tensors, axis=axis)


def stack(tensors: Sequence[Tensor]) -> Tensor:
    return Stack.apply(*tensors)


def take(x: Tensor, index) -> Tensor:
    return Take.apply(x, index=index)


def embedding_lookup(table: Tensor, ids: np.ndarray, padding_idx: Optional[int] = 0) -> Tensor:
    """Rows of `table` for `ids`; the gradient is scattered back into those rows, never into `padding_idx`."""
    return EmbeddingLookup.apply(table, ids=ids, padding_idx=padding_idx)


def softmax_rows(x: Tensor) -> Tensor:
    return SoftmaxRows.apply(x)


def relu(x: Tensor) -> Tensor:
    return ReLU.apply(x)


def clamp_max_one(x: Tensor) -> Tensor:
    return ClampMaxOne.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def tanh(x: Tensor) -> Tensor:
    return Tanh.apply(x)


def maxpool_over_time(x: Tensor, lengths: Optional[np.ndarray] = None) -> Tensor:
    return MaxPoolOverTime.apply(x, lengths=lengths)


def cross_entropy(logits: Tensor, gold: Union[int, np.ndarray]) -> Tensor:
    """Mean of -log softmax(logits)[gold] over the batch (a single row gives the plain loss)."""
    return CrossEntropy.apply(logits, gold=gold)


def dropout(x: Tensor, rate: float, rng: Optional[np.random.Generator], training: bool) -> Tensor:
    """Inverted dropout: surviving units are divided by the keep probability at train time."""
    if not training or rate <= 0.0:
        return x
    if rng is None:
        raise ValueError("dropout at train time needs a random generator")
    keep = 1.0 - rate
    mask = (rng.random(x.shape) < keep).astype(x.dtype) / x.dtype.type(keep)
    return MaskScale.apply(x, mask=mask)


@dataclass
class FilterBank:
    """Convolution filters grouped by window width; weight i is `[widths[i] * d_in, k]`."""

    widths: Tuple[int, ...]
    weights: List[Tensor]
    biases: List[Tensor]

    def __post_init__(self):
        if not (len(self.widths) == len(self.weights) == len(self.biases)):
            raise DimensionError("filter bank needs one weight and one bias per window width")

    @property
    def channels(self) -> int:
        return sum(w.shape[1] for w in self.weights)


def conv1d_temporal(x: Tensor, filters: FilterBank, pad: bool = True) -> Tensor:
    """Slide every window width of the bank over `x` and concatenate the channels per position."""
    if x.shape[-2] == 0:
        raise DimensionError("conv1d_temporal: empty sequence")
    outputs = [
        Conv1dTemporal.apply(x, weight, bias, width=width, pad=pad)
        for width, weight, bias in zip(filters.widths, filters.weights, filters.biases)
    ]
    if len(outputs) == 1:
        return outputs[0]
    return concat(outputs, axis=-1)


def lstm_gates(z: Tensor, c: Tensor) -> Tuple[Tensor, Tensor]:
    """Apply the gates to pre-activations `z = [i | f | g | o]`; returns the new (h, c)."""
    hidden = c.shape[-1]
    if z.shape[-1] != 4 * hidden:
        raise DimensionError(f"lstm: pre-activations {z.shape} do not match cell state {c.shape}")
    i = sigmoid(take(z, (Ellipsis, slice(0, hidden))))
    f = sigmoid(take(z, (Ellipsis, slice(hidden, 2 * hidden))))
    g = tanh(take(z, (Ellipsis, slice(2 * hidden, 3 * hidden))))
    o = sigmoid(take(z, (Ellipsis, slice(3 * hidden, 4 * hidden))))
    c_next = add(mul(f, c), mul(i, g))
    h_next = mul(o, tanh(c_next))
    return h_next, c_next


def lstm_cell(
    x: Tensor, h: Tensor, c: Tensor, weight_ih: Tensor, weight_hh: Tensor, bias: Tensor
) -> Tuple[Tensor, Tensor]:
    z = add(add(matmul(x, weight_ih), matmul(h, weight_hh)), bias)
    return lstm_gates(z, c)
