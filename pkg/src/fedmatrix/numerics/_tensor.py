from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .._errors import ContractError, NumericsError


ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence[float]]


class OpKind(str, Enum):
    LEAF = "leaf"
    ADD = "add"
    SUB = "sub"
    NEG = "neg"
    MUL = "mul"
    DIV = "div"
    POW = "pow"
    MATMUL = "matmul"
    SUM = "sum"
    MEAN = "mean"
    EXP = "exp"
    EXPM1 = "expm1"
    LOG = "log"
    GELU = "gelu"
    RELU = "relu"
    CLAMP_MIN = "clamp_min"
    SOFTMAX = "softmax"
    LOG_SOFTMAX = "log_softmax"
    LAYER_NORM = "layer_norm"
    RESHAPE = "reshape"
    SWAPAXES = "swapaxes"


def _as_array(value: ArrayLike) -> np.ndarray:
    return np.array(value, dtype=np.float64)


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape``, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, size in enumerate(shape) if size == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """
    计算图节点：一个不可变的 float64 数组及其梯度

    每次前向计算重新建图（define-by-run），``backward`` 对标量根节点做反向传播，
    为图中每个节点填充与 ``value`` 同形状的 ``grad``。
    """

    __slots__ = ("value", "grad", "op", "parents", "requires_grad", "_backward")

    def __init__(
        self,
        value: ArrayLike,
        *,
        parents: Tuple["Tensor", ...] = (),
        op: OpKind = OpKind.LEAF,
        requires_grad: bool = False,
    ):
        array = _as_array(value)
        if not np.all(np.isfinite(array)):
            raise NumericsError(f"non-finite value produced by '{op.value}'")
        array.flags.writeable = False
        self.value: np.ndarray = array
        self.grad: Optional[np.ndarray] = None
        self.op = op
        self.parents = parents
        self.requires_grad = requires_grad or any(p.requires_grad for p in parents)
        self._backward: Callable[[np.ndarray], None] = lambda g: None

    # -*- construction helpers

    @classmethod
    def leaf(cls, value: ArrayLike, requires_grad: bool = True) -> "Tensor":
        return cls(value, requires_grad=requires_grad)

    @staticmethod
    def lift(value: ArrayLike) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    # -*- introspection

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def size(self) -> int:
        return int(self.value.size)

    def numpy(self) -> np.ndarray:
        return self.value

    def item(self) -> float:
        if self.value.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.value.reshape(()))

    def __float__(self) -> float:
        return self.item()

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self.op.value})"

    # -*- graph plumbing

    def _accumulate(self, grad: np.ndarray) -> None:
        grad = unbroadcast(grad, self.shape)
        if not np.all(np.isfinite(grad)):
            raise NumericsError(f"non-finite gradient reached a '{self.op.value}' node")
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64)
        else:
            self.grad = self.grad + grad

    def backward(self) -> None:
        backward(self)

    # -*- operators

    def __add__(self, other: ArrayLike) -> "Tensor":
        from ._ops import add
        return add(self, other)

    def __radd__(self, other: ArrayLike) -> "Tensor":
        from ._ops import add
        return add(other, self)

    def __sub__(self, other: ArrayLike) -> "Tensor":
        from ._ops import sub
        return sub(self, other)

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        from ._ops import sub
        return sub(other, self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        from ._ops import mul
        return mul(self, other)

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        from ._ops import mul
        return mul(other, self)

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        from ._ops import div
        return div(self, other)

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        from ._ops import div
        return div(other, self)

    def __neg__(self) -> "Tensor":
        from ._ops import neg
        return neg(self)

    def __pow__(self, exponent: float) -> "Tensor":
        from ._ops import power
        return power(self, exponent)

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        from ._ops import matmul
        return matmul(self, other)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        from ._ops import sum_
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        from ._ops import mean
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> "Tensor":
        from ._ops import reshape
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def swapaxes(self, axis1: int, axis2: int) -> "Tensor":
        from ._ops import swapaxes
        return swapaxes(self, axis1, axis2)


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(root: Tensor) -> None:
    """
    Reverse-mode sweep from a scalar ``root``.

    Every node reachable from ``root`` ends up with ``grad`` equal to
    d(root)/d(node); previous gradients in the graph are discarded.
    """
    if root.size != 1:
        raise ContractError(f"backward() needs a scalar root, got shape {root.shape}")

    order = _topological_order(root)
    for node in order:
        node.grad = None
    root.grad = np.ones_like(root.value)

    for node in reversed(order):
        if node.grad is None:
            node.grad = np.zeros_like(node.value)
        node._backward(node.grad)

    for node in order:
        if node.grad is None:
            node.grad = np.zeros_like(node.value)
