import hashlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .._errors import ContractError, DimensionError


@dataclass(kw_only=True, frozen=True)
class Dataset:
    """
    一个客户端（或测试集）的表格数据

    Args:
        features: N × d 实数矩阵
        labels: N 个标签，0 = 未违约，1 = 违约
        feature_names: d 个特征名
    """
    features: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    feature_names: Tuple[str, ...]

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels)
        if features.ndim != 2:
            raise DimensionError(f"features must be an N × d matrix, got shape {features.shape}")
        if labels.shape != (features.shape[0],):
            raise DimensionError(f"expected {features.shape[0]} labels, got shape {labels.shape}")
        if len(self.feature_names) != features.shape[1]:
            raise DimensionError(
                f"{len(self.feature_names)} feature names for {features.shape[1]} feature columns"
            )
        if not np.all(np.isfinite(features)):
            raise ContractError("features must be finite")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise ContractError("labels must be 0 or 1")
        labels = labels.astype(np.int64)
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def num_features(self) -> int:
        return int(self.features.shape[1])

    def class_counts(self) -> Dict[int, int]:
        return {c: int(np.sum(self.labels == c)) for c in (0, 1)}

    @property
    def minority_rate(self) -> float:
        return float(self.labels.mean()) if len(self) else 0.0

    def subset(self, indices: Sequence[int]) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[indices],
            labels=self.labels[indices],
            feature_names=self.feature_names,
        )

    def of_class(self, label: int) -> "Dataset":
        return self.subset(np.flatnonzero(self.labels == label))

    @classmethod
    def concat(cls, parts: Iterable["Dataset"]) -> "Dataset":
        parts = list(parts)
        if not parts:
            raise ContractError("cannot concatenate zero datasets")
        names = parts[0].feature_names
        if any(p.feature_names != names for p in parts):
            raise DimensionError("cannot concatenate datasets with different feature names")
        return cls(
            features=np.concatenate([p.features for p in parts], axis=0),
            labels=np.concatenate([p.labels for p in parts], axis=0),
            feature_names=names,
        )

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update("\x1f".join(self.feature_names).encode("utf-8"))
        digest.update(np.ascontiguousarray(self.features, dtype="<f8").tobytes())
        digest.update(np.ascontiguousarray(self.labels, dtype="<i8").tobytes())
        return digest.hexdigest()


def datasets_fingerprint(datasets: Iterable[Dataset]) -> str:
    digest = hashlib.sha256()
    for ds in datasets:
        digest.update(ds.fingerprint().encode("ascii"))
    return digest.hexdigest()
