from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

from src.core.errors import DimensionError
from src.core.tensor import Tensor


@dataclass
class AdamState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_step(
    params: Mapping[str, np.ndarray], grads: Mapping[str, Optional[np.ndarray]], state: AdamState, lr: float
) -> None:
    """Bias-corrected Adam update applied to `params` in place; a missing gradient counts as zero."""
    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    step_size = lr / bc1

    for name, value in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(value)
        if g.shape != value.shape:
            raise DimensionError(f"adam: gradient {g.shape} does not match parameter {name} {value.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(value)
            state.v[name] = np.zeros_like(value)
        m, v = state.m[name], state.v[name]
        if m.shape != value.shape:
            raise DimensionError(f"adam: moment buffer {m.shape} does not match parameter {name} {value.shape}")

        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        value -= step_size * m / (np.sqrt(v / bc2) + state.eps)


class Adam:
    def __init__(self, params: Mapping[str, Tensor], lr: float = 0.001):
        self.params = {name: p for name, p in params.items() if p.requires_grad}
        self.lr = lr
        self.state = AdamState()

    def step(self) -> None:
        adam_step(
            {name: p.data for name, p in self.params.items()},
            {name: p.grad for name, p in self.params.items()},
            self.state,
            self.lr,
        )
