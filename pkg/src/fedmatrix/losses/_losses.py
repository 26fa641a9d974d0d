from typing import Callable, Dict, Literal, Mapping, Sequence, Union

import numpy as np

from .._errors import ContractError, DimensionError
from ..numerics import ParameterVector, Tensor, clamp_min, expm1, power
from ._config import LossConfig, LossKind


Reduction = Literal["sum", "mean"]
VectorLike = Union[Tensor, ParameterVector, Sequence[float]]


def _check_labels(log_probs: Tensor, labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    if log_probs.ndim != 2:
        raise DimensionError(f"log-probabilities must be (N, C), got {log_probs.shape}")
    if labels.shape != (log_probs.shape[0],):
        raise DimensionError(f"expected {log_probs.shape[0]} labels, got shape {labels.shape}")
    num_classes = log_probs.shape[1]
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes or not np.all(labels == np.round(labels))):
        raise ContractError(f"labels must be integers in [0, {num_classes - 1}]")
    return labels.astype(np.int64)


def _pick_true_class(log_probs: Tensor, labels: np.ndarray) -> Tensor:
    one_hot = np.zeros(log_probs.shape)
    one_hot[np.arange(labels.size), labels] = 1.0
    return (log_probs * one_hot).sum(axis=1)


def _reduce(per_sample: Tensor, reduction: Reduction) -> Tensor:
    total = per_sample.sum()
    if reduction == "mean":
        return total / max(per_sample.size, 1)
    return total


def weighted_nll(
    log_probs: Union[Tensor, np.ndarray],
    labels: Sequence[int],
    class_weights: Sequence[float],
    reduction: Reduction = "sum",
) -> Tensor:
    """
    加权负对数似然：``-Σ_i β_{y_i} · logp[i, y_i]``

    Args:
        log_probs: (N, C) 对数概率（log-softmax 输出）
        labels: N 个类别标签
        class_weights: 每个类别的权重 β_c
        reduction: "sum"（默认）或 "mean"（除以批大小，用于优化步）
    """
    log_probs = Tensor.lift(log_probs)
    labels = _check_labels(log_probs, labels)
    beta = np.asarray(class_weights, dtype=np.float64)[labels]
    return _reduce(-(_pick_true_class(log_probs, labels) * beta), reduction)


def focal_loss(
    log_probs: Union[Tensor, np.ndarray],
    labels: Sequence[int],
    class_weights: Sequence[float],
    gamma: float = 2.0,
    reduction: Reduction = "sum",
) -> Tensor:
    """``-Σ_i β_{y_i} · (1 - p_i)^γ · ln p_i`` with ``p_i`` the true-class probability."""
    if gamma < 0:
        raise ContractError(f"focal gamma must be >= 0, got {gamma}")
    log_probs = Tensor.lift(log_probs)
    labels = _check_labels(log_probs, labels)
    beta = np.asarray(class_weights, dtype=np.float64)[labels]
    log_p = _pick_true_class(log_probs, labels)
    weighted = log_p * beta
    if gamma > 0:
        # 1 - p via expm1 stays positive for confident predictions; the floor keeps
        # the power gradient finite when p rounds to exactly 1
        miss = clamp_min(-expm1(log_p), np.finfo(np.float64).tiny)
        weighted = weighted * power(miss, gamma)
    return _reduce(-weighted, reduction)


def _cross_entropy(log_probs, labels, config: LossConfig, reduction: Reduction) -> Tensor:
    return weighted_nll(log_probs, labels, config.class_weights, reduction)


_DATA_LOSSES: Dict[LossKind, Callable[..., Tensor]] = {
    LossKind.WEIGHTED_NLL: lambda lp, y, cfg, red: weighted_nll(lp, y, cfg.class_weights, red),
    LossKind.CROSS_ENTROPY: _cross_entropy,
    LossKind.FOCAL: lambda lp, y, cfg, red: focal_loss(lp, y, cfg.class_weights, cfg.focal_gamma, red),
}


def data_loss(
    log_probs: Union[Tensor, np.ndarray],
    labels: Sequence[int],
    config: LossConfig,
    reduction: Reduction = "mean",
) -> Tensor:
    return _DATA_LOSSES[LossKind(config.kind)](log_probs, labels, config, reduction)


def proximal_penalty(
    w_local: Union[VectorLike, Mapping[str, Tensor]],
    w_global: Union[VectorLike, Mapping[str, np.ndarray]],
    mu: float,
) -> Tensor:
    """
    FedProx 近端项 ``(μ/2)·‖w_local − w_global‖²``

    两个参数可以是扁平向量，也可以是同名参数块的映射（训练时对每个块求和）。

    Raises:
        DimensionError: 长度或参数块形状不一致
        ContractError: μ < 0
    """
    if mu < 0:
        raise ContractError(f"proximal coefficient must be >= 0, got {mu}")

    if isinstance(w_local, Mapping):
        if set(w_local) != set(w_global):
            raise DimensionError("proximal_penalty: parameter blocks differ")
        total = Tensor(0.0)
        for name, local in w_local.items():
            reference = np.asarray(w_global[name], dtype=np.float64)
            if local.shape != reference.shape:
                raise DimensionError(f"proximal_penalty: block '{name}' {local.shape} != {reference.shape}")
            total = total + ((local - reference) ** 2).sum()
        return total * (mu / 2.0)

    local = Tensor.lift(w_local)
    reference = np.asarray(w_global.value if isinstance(w_global, Tensor) else w_global, dtype=np.float64)
    if local.shape != reference.shape:
        raise DimensionError(f"proximal_penalty: length {local.size} != {reference.size}")
    return ((local - reference) ** 2).sum() * (mu / 2.0)
