"""
Named finite-difference checks over every differentiable op and every architecture.

All checks run at float64 on tiny shapes; each one reduces the op output to a scalar
with a fixed random projection so every output coordinate reaches the loss.
"""
from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.components.data.batching import make_batch
from src.components.models.factory import ARCHITECTURES, build_model
from src.config.models import EncoderConfig
from src.core.gradcheck import finite_diff_check, finite_diff_check_params, near, pooling_ties
from src.core.ops import (
    FilterBank,
    add,
    clamp_max_one,
    concat,
    conv1d_temporal,
    cross_entropy,
    dropout,
    embedding_lookup,
    lstm_cell,
    matmul,
    maxpool_over_time,
    mul,
    relu,
    scale,
    sigmoid,
    softmax_rows,
    stack,
    sum_all,
    sum_rows,
    take,
    tanh,
)
from src.core.tensor import Tensor, constant

logger = logging.getLogger(__name__)

TOLERANCE = 1e-4
DEFAULT_SEEDS = (0, 1, 2, 3, 4)

Check = Callable[[np.random.Generator], float]


def _tensor(rng: np.random.Generator, *shape: int, low: float = -1.0, high: float = 1.0) -> Tensor:
    return constant(rng.uniform(low, high, shape), dtype=np.float64)


def _check_inputs(
    build: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    rng: np.random.Generator,
    skips: Optional[Sequence[Optional[np.ndarray]]] = None,
) -> float:
    """Worst error over all inputs of `build`, whose output is projected to a scalar; `skips` masks kinks per input."""
    projection = constant(rng.standard_normal(build(*inputs).shape), dtype=np.float64)
    worst = 0.0
    for i in range(len(inputs)):
        def f(x: Tensor, i: int = i) -> Tensor:
            args = list(inputs)
            args[i] = x
            return sum_all(mul(build(*args), projection))

        worst = max(worst, finite_diff_check(f, inputs[i], skip=skips[i] if skips else None))
    return worst


def _lengths_mask(lengths: Sequence[int], n: int) -> np.ndarray:
    return np.arange(n)[None, :] < np.asarray(lengths)[:, None]


def check_matmul(rng):
    return _check_inputs(matmul, [_tensor(rng, 2, 3, 4), _tensor(rng, 4, 5)], rng)


def check_add(rng):
    return _check_inputs(add, [_tensor(rng, 2, 3, 4), _tensor(rng, 4)], rng)


def check_mul(rng):
    return _check_inputs(mul, [_tensor(rng, 3, 4), _tensor(rng, 3, 4)], rng)


def check_scale(rng):
    return _check_inputs(lambda a: scale(a, -1.7), [_tensor(rng, 3, 4)], rng)


def check_sum_rows(rng):
    mask = _lengths_mask([4, 2], 4)
    return _check_inputs(lambda x: sum_rows(x, mask=mask), [_tensor(rng, 2, 4, 3)], rng)


def check_sum_all(rng):
    return _check_inputs(sum_all, [_tensor(rng, 3, 4)], rng)


def check_concat(rng):
    return _check_inputs(lambda a, b: concat([a, b], axis=-1), [_tensor(rng, 3, 2), _tensor(rng, 3, 4)], rng)


def check_stack(rng):
    return _check_inputs(lambda a, b: stack([a, b]), [_tensor(rng, 3), _tensor(rng, 3)], rng)


def check_take(rng):
    return _check_inputs(lambda x: take(x, (1, slice(0, 3))), [_tensor(rng, 3, 4)], rng)


def check_embedding_lookup(rng):
    table = _tensor(rng, 5, 3)
    ids = np.array([[1, 2, 0], [3, 1, 1]])
    projection = constant(rng.standard_normal((2, 3, 3)), dtype=np.float64)
    # the padding row never receives a gradient
    skip = np.zeros(table.shape, dtype=bool)
    skip[0] = True
    return finite_diff_check(lambda t: sum_all(mul(embedding_lookup(t, ids), projection)), table, skip=skip)


def check_softmax_rows(rng):
    return _check_inputs(softmax_rows, [_tensor(rng, 2, 3, 4, low=-2.0, high=2.0)], rng)


def check_relu(rng):
    x = _tensor(rng, 3, 4)
    return _check_inputs(relu, [x], rng, skips=[near(x.data, 0.0)])


def check_clamp_max_one(rng):
    x = _tensor(rng, 3, 4, low=0.0, high=2.0)
    return _check_inputs(clamp_max_one, [x], rng, skips=[near(x.data, 1.0)])


def check_sigmoid(rng):
    return _check_inputs(sigmoid, [_tensor(rng, 3, 4, low=-3.0, high=3.0)], rng)


def check_tanh(rng):
    return _check_inputs(tanh, [_tensor(rng, 3, 4, low=-2.0, high=2.0)], rng)


def check_conv1d_temporal(rng):
    d, k = 3, 4

    def build(x, w2, b2, w3, b3):
        return conv1d_temporal(x, FilterBank((2, 3), [w2, w3], [b2, b3]))

    inputs = [_tensor(rng, 2, 5, d), _tensor(rng, 2 * d, k), _tensor(rng, k), _tensor(rng, 3 * d, k), _tensor(rng, k)]
    return _check_inputs(build, inputs, rng)


def check_maxpool_over_time(rng):
    lengths = np.array([5, 3])
    x = _tensor(rng, 2, 5, 3)
    return _check_inputs(
        lambda t: maxpool_over_time(t, lengths=lengths), [x], rng, skips=[pooling_ties(x.data, lengths)]
    )


def check_cross_entropy(rng):
    gold = np.array([0, 2, 1, 2])
    return _check_inputs(lambda x: cross_entropy(x, gold), [_tensor(rng, 4, 3, low=-2.0, high=2.0)], rng)


def check_dropout(rng):
    seed = int(rng.integers(1 << 31))
    # a fresh generator per call keeps the mask fixed across evaluations
    return _check_inputs(
        lambda x: dropout(x, 0.5, np.random.default_rng(seed), training=True), [_tensor(rng, 3, 4)], rng
    )


def check_lstm_cell(rng):
    d_in, hidden = 3, 4

    def build(x, h, c, w_ih, w_hh, b):
        h_next, c_next = lstm_cell(x, h, c, w_ih, w_hh, b)
        return concat([h_next, c_next], axis=-1)

    inputs = [
        _tensor(rng, d_in),
        _tensor(rng, hidden),
        _tensor(rng, hidden),
        _tensor(rng, d_in, 4 * hidden),
        _tensor(rng, hidden, 4 * hidden),
        _tensor(rng, 4 * hidden),
    ]
    return _check_inputs(build, inputs, rng)


def architecture_check(architecture: str, rng: np.random.Generator) -> float:
    """Gradient of the batch loss of a tiny model with respect to every one of its parameters."""
    vocab_size, width, categories = 7, 4, 3
    embedding = rng.uniform(-0.5, 0.5, (vocab_size, width))
    embedding[0] = 0.0
    encoder_cfg = EncoderConfig(filter_sizes=(2, 3), filters_per_size=3, lstm_hidden=3)
    model = build_model(
        architecture, embedding, categories, encoder_cfg, d=4, d_s=5, dropout=0.0, rng=rng, dtype=np.float64
    )
    batch = make_batch(
        [rng.integers(1, vocab_size, size=n) for n in (4, 2, 3)],
        labels=rng.integers(0, categories, size=3),
    )
    skip = np.zeros(model.embedding.shape, dtype=bool)
    skip[0] = True
    errors = finite_diff_check_params(
        lambda: cross_entropy(model.logits(batch), batch.labels), model.parameters(), skip={"embedding": skip}
    )
    return max(errors.values())


OP_CHECKS: Dict[str, Check] = {
    "matmul": check_matmul,
    "add": check_add,
    "mul": check_mul,
    "scale": check_scale,
    "sum_rows": check_sum_rows,
    "sum_all": check_sum_all,
    "concat": check_concat,
    "stack": check_stack,
    "take": check_take,
    "embedding_lookup": check_embedding_lookup,
    "softmax_rows": check_softmax_rows,
    "relu": check_relu,
    "clamp_max_one": check_clamp_max_one,
    "sigmoid": check_sigmoid,
    "tanh": check_tanh,
    "conv1d_temporal": check_conv1d_temporal,
    "maxpool_over_time": check_maxpool_over_time,
    "cross_entropy": check_cross_entropy,
    "dropout": check_dropout,
    "lstm_cell": check_lstm_cell,
}


def all_checks() -> Dict[str, Check]:
    checks = dict(OP_CHECKS)
    for architecture in ARCHITECTURES:
        checks[architecture] = lambda rng, architecture=architecture: architecture_check(architecture, rng)
    return checks


@dataclass
class SuiteReport:
    errors: Dict[str, float] = field(default_factory=dict)
    tolerance: float = TOLERANCE

    @property
    def failures(self) -> List[str]:
        return [name for name, error in self.errors.items() if not error < self.tolerance]

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> List[str]:
        width = max(len(name) for name in self.errors) if self.errors else 0
        rows = [
            f"{name:<{width}}  {error:.3e}  {'ok' if error < self.tolerance else 'FAIL'}"
            for name, error in self.errors.items()
        ]
        rows.append(f"{'passed' if self.passed else 'failed'}: {len(self.errors) - len(self.failures)}/{len(self.errors)}")
        return rows


def run_suite(seeds: Sequence[int] = DEFAULT_SEEDS, checks: Dict[str, Check] = None) -> SuiteReport:
    """Maximum relative error of each named check over `seeds`."""
    checks = all_checks() if checks is None else checks
    report = SuiteReport()
    for name, check in checks.items():
        report.errors[name] = max(check(np.random.default_rng(seed)) for seed in seeds)
        logger.info(f"gradient check {name}: max relative error {report.errors[name]:.3e}")
    return report
