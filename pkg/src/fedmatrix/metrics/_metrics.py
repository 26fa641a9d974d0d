from dataclasses import asdict, dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from .._errors import ContractError, DimensionError


@dataclass(kw_only=True, frozen=True)
class ConfusionCounts:
    """正类为违约类（label 1）的混淆矩阵计数"""
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(kw_only=True, frozen=True)
class BinaryScores:
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def _binary(values: Sequence[int], name: str) -> np.ndarray:
    array = np.asarray(values)
    if array.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {array.shape}")
    if array.size and not np.isin(array, (0, 1)).all():
        raise ContractError(f"{name} must only contain 0 and 1")
    return array.astype(np.int64)


def predictions_from_log_probs(log_probs: np.ndarray) -> np.ndarray:
    """argmax over two classes; ties go to class 0."""
    log_probs = np.asarray(log_probs, dtype=np.float64)
    return (log_probs[:, 1] > log_probs[:, 0]).astype(np.int64)


def _paired(predictions: Sequence[int], labels: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    predictions = _binary(predictions, "predictions")
    labels = _binary(labels, "labels")
    if predictions.shape != labels.shape:
        raise ContractError(f"predictions ({predictions.size}) and labels ({labels.size}) differ in length")
    return predictions, labels


def confusion(predictions: Sequence[int], labels: Sequence[int]) -> ConfusionCounts:
    predictions, labels = _paired(predictions, labels)
    if labels.size == 0:
        return ConfusionCounts(tp=0, fp=0, tn=0, fn=0)
    tn, fp, fn, tp = confusion_matrix(labels, predictions, labels=[0, 1]).ravel()
    return ConfusionCounts(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


def precision_recall_f1(predictions: Sequence[int], labels: Sequence[int]) -> Tuple[float, float, float]:
    """少数类（label 1）的 precision / recall / F1，分母为 0 时记为 0"""
    predictions, labels = _paired(predictions, labels)
    if labels.size == 0:
        return 0.0, 0.0, 0.0
    precision, recall, f1, _ = precision_recall_fscore_support(
        labels, predictions, average="binary", pos_label=1, zero_division=0,
    )
    return float(precision), float(recall), float(f1)


def minority_scores(predictions: Sequence[int], labels: Sequence[int]) -> BinaryScores:
    precision, recall, f1 = precision_recall_f1(predictions, labels)
    return BinaryScores(precision=precision, recall=recall, f1=f1)
