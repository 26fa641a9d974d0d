import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .._errors import DimensionError
from ._tensor import ArrayLike, OpKind, Tensor


Axis = Optional[Union[int, Tuple[int, ...]]]

_GELU_C = math.sqrt(2.0 / math.pi)
_GELU_A = 0.044715


def _send(node: Tensor, grad: np.ndarray) -> None:
    if node.requires_grad:
        node._accumulate(grad)


def _broadcast_shape(a: Tensor, b: Tensor, op: OpKind) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise DimensionError(f"{op.value}: cannot broadcast {a.shape} with {b.shape}") from exc


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = Tensor.lift(a), Tensor.lift(b)
    _broadcast_shape(a, b, OpKind.ADD)
    out = Tensor(a.value + b.value, parents=(a, b), op=OpKind.ADD)

    def _backward(g: np.ndarray) -> None:
        _send(a, g)
        _send(b, g)
    out._backward = _backward
    return out


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = Tensor.lift(a), Tensor.lift(b)
    _broadcast_shape(a, b, OpKind.SUB)
    out = Tensor(a.value - b.value, parents=(a, b), op=OpKind.SUB)

    def _backward(g: np.ndarray) -> None:
        _send(a, g)
        _send(b, -g)
    out._backward = _backward
    return out


def neg(a: ArrayLike) -> Tensor:
    a = Tensor.lift(a)
    out = Tensor(-a.value, parents=(a,), op=OpKind.NEG)
    out._backward = lambda g: _send(a, -g)
    return out


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = Tensor.lift(a), Tensor.lift(b)
    _broadcast_shape(a, b, OpKind.MUL)
    out = Tensor(a.value * b.value, parents=(a, b), op=OpKind.MUL)

    def _backward(g: np.ndarray) -> None:
        _send(a, g * b.value)
        _send(b, g * a.value)
    out._backward = _backward
    return out


def div(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = Tensor.lift(a), Tensor.lift(b)
    _broadcast_shape(a, b, OpKind.DIV)
    out = Tensor(a.value / b.value, parents=(a, b), op=OpKind.DIV)

    def _backward(g: np.ndarray) -> None:
        _send(a, g / b.value)
        _send(b, -g * a.value / (b.value * b.value))
    out._backward = _backward
    return out


def power(a: ArrayLike, exponent: float) -> Tensor:
    a = Tensor.lift(a)
    exponent = float(exponent)
    out = Tensor(a.value ** exponent, parents=(a,), op=OpKind.POW)

    def _backward(g: np.ndarray) -> None:
        if exponent == 0.0:
            return
        with np.errstate(divide="ignore", invalid="ignore"):
            grad = g * exponent * a.value ** (exponent - 1.0)
        _send(a, grad)
    out._backward = _backward
    return out


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """
    矩阵乘法，支持批维度广播（与 ``np.matmul`` 语义一致）

    Raises:
        DimensionError: 内维不一致
    """
    a, b = Tensor.lift(a), Tensor.lift(b)
    if a.ndim < 2 or b.ndim < 2:
        raise DimensionError(f"matmul needs operands with ndim >= 2, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul inner dimensions differ: {a.shape} @ {b.shape}")
    try:
        value = np.matmul(a.value, b.value)
    except ValueError as exc:
        raise DimensionError(f"matmul batch dimensions differ: {a.shape} @ {b.shape}") from exc
    out = Tensor(value, parents=(a, b), op=OpKind.MATMUL)

    def _backward(g: np.ndarray) -> None:
        _send(a, np.matmul(g, np.swapaxes(b.value, -1, -2)))
        _send(b, np.matmul(np.swapaxes(a.value, -1, -2), g))
    out._backward = _backward
    return out


def _expand_reduced(g: np.ndarray, shape: Tuple[int, ...], axis: Axis, keepdims: bool) -> np.ndarray:
    if axis is not None and not keepdims:
        axes = (axis,) if isinstance(axis, int) else axis
        axes = tuple(ax % len(shape) for ax in axes)
        g = np.expand_dims(g, axes)
    return np.broadcast_to(g, shape)


def sum_(a: ArrayLike, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = Tensor.lift(a)
    out = Tensor(a.value.sum(axis=axis, keepdims=keepdims), parents=(a,), op=OpKind.SUM)
    out._backward = lambda g: _send(a, _expand_reduced(g, a.shape, axis, keepdims))
    return out


def mean(a: ArrayLike, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = Tensor.lift(a)
    value = a.value.mean(axis=axis, keepdims=keepdims)
    count = a.size // max(int(np.size(value)), 1)
    out = Tensor(value, parents=(a,), op=OpKind.MEAN)
    out._backward = lambda g: _send(a, _expand_reduced(g, a.shape, axis, keepdims) / count)
    return out


def exp(a: ArrayLike) -> Tensor:
    a = Tensor.lift(a)
    with np.errstate(over="ignore"):
        value = np.exp(a.value)
    out = Tensor(value, parents=(a,), op=OpKind.EXP)
    out._backward = lambda g: _send(a, g * out.value)
    return out


def expm1(a: ArrayLike) -> Tensor:
    """``exp(a) - 1`` without cancellation for small ``a``."""
    a = Tensor.lift(a)
    with np.errstate(over="ignore"):
        value = np.expm1(a.value)
    out = Tensor(value, parents=(a,), op=OpKind.EXPM1)
    out._backward = lambda g: _send(a, g * (out.value + 1.0))
    return out


def log(a: ArrayLike) -> Tensor:
    a = Tensor.lift(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.log(a.value)
    out = Tensor(value, parents=(a,), op=OpKind.LOG)
    out._backward = lambda g: _send(a, g / a.value)
    return out


def relu(a: ArrayLike) -> Tensor:
    a = Tensor.lift(a)
    out = Tensor(np.maximum(a.value, 0.0), parents=(a,), op=OpKind.RELU)
    out._backward = lambda g: _send(a, g * (a.value > 0.0))
    return out


def clamp_min(a: ArrayLike, floor: float) -> Tensor:
    # no gradient flows through clamped entries
    a = Tensor.lift(a)
    out = Tensor(np.maximum(a.value, floor), parents=(a,), op=OpKind.CLAMP_MIN)
    out._backward = lambda g: _send(a, g * (a.value >= floor))
    return out


def gelu(a: ArrayLike) -> Tensor:
    """GELU, tanh approximation; smooth everywhere so finite differences agree."""
    a = Tensor.lift(a)
    x = a.value
    inner = _GELU_C * (x + _GELU_A * x ** 3)
    t = np.tanh(inner)
    out = Tensor(0.5 * x * (1.0 + t), parents=(a,), op=OpKind.GELU)

    def _backward(g: np.ndarray) -> None:
        d_inner = _GELU_C * (1.0 + 3.0 * _GELU_A * x ** 2)
        local = 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t ** 2) * d_inner
        _send(a, g * local)
    out._backward = _backward
    return out


def softmax(a: ArrayLike, axis: int = -1) -> Tensor:
    a = Tensor.lift(a)
    if not -a.ndim <= axis < max(a.ndim, 1):
        raise DimensionError(f"softmax axis {axis} invalid for shape {a.shape}")
    shifted = a.value - a.value.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)
    out = Tensor(s, parents=(a,), op=OpKind.SOFTMAX)

    def _backward(g: np.ndarray) -> None:
        _send(a, s * (g - (g * s).sum(axis=axis, keepdims=True)))
    out._backward = _backward
    return out


def log_softmax(a: ArrayLike, axis: int = -1) -> Tensor:
    a = Tensor.lift(a)
    if not -a.ndim <= axis < max(a.ndim, 1):
        raise DimensionError(f"log_softmax axis {axis} invalid for shape {a.shape}")
    shifted = a.value - a.value.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    value = shifted - lse
    out = Tensor(value, parents=(a,), op=OpKind.LOG_SOFTMAX)

    def _backward(g: np.ndarray) -> None:
        s = np.exp(value)
        _send(a, g - s * g.sum(axis=axis, keepdims=True))
    out._backward = _backward
    return out


def layer_norm(x: ArrayLike, gain: ArrayLike, bias: ArrayLike, eps: float = 1e-5) -> Tensor:
    """
    对最后一维做层归一化：``gain * (x - mean) / sqrt(var + eps) + bias``

    Args:
        x: 任意形状的输入，最后一维为特征维
        gain: 形状为 (features,) 的缩放
        bias: 形状为 (features,) 的偏置
        eps: 方差平滑项，必须大于 0
    """
    x, gain, bias = Tensor.lift(x), Tensor.lift(gain), Tensor.lift(bias)
    if eps <= 0:
        raise DimensionError(f"layer_norm eps must be > 0, got {eps}")
    if gain.shape != x.shape[-1:] or bias.shape != x.shape[-1:]:
        raise DimensionError(
            f"layer_norm gain/bias must have shape {x.shape[-1:]}, got {gain.shape} and {bias.shape}"
        )
    mu = x.value.mean(axis=-1, keepdims=True)
    centered = x.value - mu
    var = (centered ** 2).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = centered * inv_std
    out = Tensor(gain.value * x_hat + bias.value, parents=(x, gain, bias), op=OpKind.LAYER_NORM)

    def _backward(g: np.ndarray) -> None:
        _send(gain, g * x_hat)
        _send(bias, g)
        if x.requires_grad:
            d_hat = g * gain.value
            dx = inv_std * (
                d_hat
                - d_hat.mean(axis=-1, keepdims=True)
                - x_hat * (d_hat * x_hat).mean(axis=-1, keepdims=True)
            )
            x._accumulate(dx)
    out._backward = _backward
    return out


def reshape(a: ArrayLike, shape: Sequence[int]) -> Tensor:
    a = Tensor.lift(a)
    try:
        value = a.value.reshape(tuple(shape))
    except ValueError as exc:
        raise DimensionError(f"cannot reshape {a.shape} into {tuple(shape)}") from exc
    out = Tensor(value, parents=(a,), op=OpKind.RESHAPE)
    out._backward = lambda g: _send(a, g.reshape(a.shape))
    return out


def swapaxes(a: ArrayLike, axis1: int, axis2: int) -> Tensor:
    a = Tensor.lift(a)
    out = Tensor(np.swapaxes(a.value, axis1, axis2), parents=(a,), op=OpKind.SWAPAXES)
    out._backward = lambda g: _send(a, np.swapaxes(g, axis1, axis2))
    return out
