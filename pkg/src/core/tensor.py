import logging
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import DimensionError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]


class Function:
    """
    Base class for differentiable operations.

    Subclasses implement `forward` on raw numpy arrays and `backward`, which maps the
    gradient with respect to the output to one gradient (or None) per input.
    """

    def __init__(self, *inputs: "Tensor"):
        self.inputs = inputs
        self.needs_grad = tuple(t.requires_grad for t in inputs)

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no forward pass")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError(f"{type(self).__name__} has no backward pass")

    @classmethod
    def apply(cls, *inputs: "Tensor", **kwargs: Any) -> "Tensor":
        """Run the forward pass and record this operation as the creator of the result."""
        fn = cls(*inputs)
        out = fn.forward(*(t.data for t in inputs), **kwargs)
        requires_grad = any(fn.needs_grad)
        return Tensor(out, requires_grad=requires_grad, creator=fn if requires_grad else None)


class Tensor:
    """
    A dense array taking part in reverse-mode differentiation.

    Leaves are created directly (parameters, inputs); every other tensor keeps a
    reference to the `Function` that produced it.
    """

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        creator: Optional[Function] = None,
        dtype: Optional[np.dtype] = None,
    ):
        array = np.asarray(data, dtype=dtype)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float64)
        self.data = array
        self.requires_grad = requires_grad
        self.creator = creator
        self.grad: Optional[np.ndarray] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def is_leaf(self) -> bool:
        return self.creator is None

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if grad.shape != self.data.shape:
            raise DimensionError(f"gradient of shape {grad.shape} does not match tensor of shape {self.shape}")
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.data.dtype, copy=True)
        else:
            self.grad += grad

    def __add__(self, other: "Tensor") -> "Tensor":
        from src.core import ops

        return ops.add(self, other)

    def __mul__(self, other: Union["Tensor", float]) -> "Tensor":
        from src.core import ops

        if isinstance(other, Tensor):
            return ops.mul(self, other)
        return ops.scale(self, float(other))

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from src.core import ops

        return ops.matmul(self, other)

    def __getitem__(self, index: Any) -> "Tensor":
        from src.core import ops

        return ops.take(self, index)

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{flag})"


class Tape:
    """
    The operations that produced `root`, in topological order (inputs before outputs).

    Replaying it backwards visits every node after all of its consumers, so each
    node's gradient is complete by the time it is propagated further.
    """

    def __init__(self, root: Tensor):
        self.root = root
        self.nodes: List[Tensor] = _topological_order(root)

    def __len__(self) -> int:
        return len(self.nodes)

    def backward(self, seed: Optional[np.ndarray] = None) -> None:
        if seed is None:
            seed = np.ones_like(self.root.data)
        grads = {id(self.root): seed}
        for node in reversed(self.nodes):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            if node.creator is None:
                node.accumulate_grad(grad)
                continue
            fn = node.creator
            input_grads = fn.backward(grad)
            for tensor, needs, input_grad in zip(fn.inputs, fn.needs_grad, input_grads):
                if not needs or input_grad is None:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + input_grad
                else:
                    grads[key] = input_grad


def _topological_order(root: Tensor) -> List[Tensor]:
    # iterative post-order DFS; LSTM chains are too deep for recursion
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        if node.creator is not None:
            for parent in node.creator.inputs:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
    return order


def backward(loss: Tensor) -> None:
    """Populate `.grad` on every leaf reachable from a scalar loss; repeated calls accumulate."""
    if loss.data.size != 1:
        raise DimensionError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        logger.debug("backward called on a tensor that does not require grad")
        return
    Tape(loss).backward()


def parameter(data: ArrayLike, dtype: Optional[np.dtype] = None) -> Tensor:
    return Tensor(data, requires_grad=True, dtype=dtype)


def constant(data: ArrayLike, dtype: Optional[np.dtype] = None) -> Tensor:
    return Tensor(data, requires_grad=False, dtype=dtype)
