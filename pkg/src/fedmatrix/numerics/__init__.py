from ._tensor import Tensor, OpKind, backward, unbroadcast
from ._ops import (
    add,
    sub,
    neg,
    mul,
    div,
    power,
    matmul,
    sum_,
    mean,
    exp,
    expm1,
    log,
    relu,
    clamp_min,
    gelu,
    softmax,
    log_softmax,
    layer_norm,
    reshape,
    swapaxes,
)
from ._optim import ParameterVector, as_parameter_vector, sgd_step


__all__ = [
    "Tensor",
    "OpKind",
    "backward",
    "unbroadcast",
    "add",
    "sub",
    "neg",
    "mul",
    "div",
    "power",
    "matmul",
    "sum_",
    "mean",
    "exp",
    "expm1",
    "log",
    "relu",
    "clamp_min",
    "gelu",
    "softmax",
    "log_softmax",
    "layer_norm",
    "reshape",
    "swapaxes",
    "ParameterVector",
    "as_parameter_vector",
    "sgd_step",
]
