"""Central finite-difference checks for the analytic gradients."""
import logging
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from src.core.errors import DimensionError
from src.core.tensor import Tensor, backward

logger = logging.getLogger(__name__)

# disagreements below this are float64 round-off in f(x ± eps), not gradient bugs
ABSOLUTE_TOLERANCE = 1e-9
KINK_RADIUS = 1e-6


def _relative_error(analytic: float, numeric: float) -> float:
    diff = abs(analytic - numeric)
    if diff <= ABSOLUTE_TOLERANCE:
        return 0.0
    return diff / max(1e-8, abs(analytic) + abs(numeric))


def _scalar(value: Tensor) -> float:
    if value.data.size != 1:
        raise DimensionError(f"finite_diff_check needs a scalar-valued function, got shape {value.shape}")
    return value.item()


def _check_tensor(
    evaluate: Callable[[], Tensor],
    x: Tensor,
    analytic: np.ndarray,
    eps: float,
    skip: Optional[np.ndarray],
) -> float:
    flat = x.data.reshape(-1)
    analytic = analytic.reshape(-1)
    skipped = None if skip is None else np.asarray(skip, dtype=bool).reshape(-1)
    worst = 0.0
    for i in range(flat.size):
        if skipped is not None and skipped[i]:
            continue
        original = flat[i]
        flat[i] = original + eps
        f_plus = _scalar(evaluate())
        flat[i] = original - eps
        f_minus = _scalar(evaluate())
        flat[i] = original
        numeric = (f_plus - f_minus) / (2.0 * eps)
        worst = max(worst, _relative_error(float(analytic[i]), numeric))
    return worst


def finite_diff_check(
    f: Callable[[Tensor], Tensor], x: Tensor, eps: float = 1e-5, skip: Optional[np.ndarray] = None
) -> float:
    """
    Compare the gradient of scalar `f` at `x` with central differences.

    Returns the maximum over coordinates of |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
    Only coordinates flagged in `skip` are left out; callers flag kinks and ties with `near`.
    """
    x.data = np.ascontiguousarray(x.data)
    x.requires_grad = True
    x.grad = None
    value = f(x)
    _scalar(value)
    backward(value)
    analytic = x.grad if x.grad is not None else np.zeros_like(x.data)
    return _check_tensor(lambda: f(x), x, analytic, eps, skip)


def finite_diff_check_params(
    f: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    eps: float = 1e-5,
    skip: Optional[Mapping[str, np.ndarray]] = None,
) -> Dict[str, float]:
    """Run `finite_diff_check` for every tensor of `params` against one closure; returns the error per name."""
    skip = skip or {}
    for p in params.values():
        p.data = np.ascontiguousarray(p.data)
        p.grad = None
    value = f()
    _scalar(value)
    backward(value)
    errors = {}
    for name, p in params.items():
        analytic = p.grad if p.grad is not None else np.zeros_like(p.data)
        errors[name] = _check_tensor(f, p, analytic, eps, skip.get(name))
        logger.debug(f"gradient check {name}: max relative error {errors[name]:.3e}")
    return errors


def near(values: np.ndarray, point: float, radius: float = KINK_RADIUS) -> np.ndarray:
    """Mask of entries within `radius` of a non-differentiable `point`."""
    return np.abs(np.asarray(values) - point) < radius


def pooling_ties(x: np.ndarray, lengths: Optional[np.ndarray] = None, radius: float = KINK_RADIUS) -> np.ndarray:
    """
    Mask of the time positions of `x` ([n, k] or [B, L, k]) that compete for a column maximum.

    A column whose two largest values are within `radius` has every position within
    `radius` of its maximum flagged; padding past `lengths` is ignored.
    """
    x = np.asarray(x, dtype=np.float64)
    batched = x.reshape((1,) + x.shape) if x.ndim == 2 else x
    valid = np.ones(batched.shape[:2], dtype=bool)
    if lengths is not None:
        valid = np.arange(batched.shape[1])[None, :] < np.asarray(lengths)[:, None]
    values = np.where(valid[:, :, None], batched, -np.inf)
    top = np.sort(values, axis=1)
    if top.shape[1] < 2:
        return np.zeros(x.shape, dtype=bool)
    tied = (top[:, -1, :] - top[:, -2, :]) < radius
    mask = tied[:, None, :] & (top[:, -1:, :] - values < radius) & valid[:, :, None]
    return mask.reshape(x.shape)
