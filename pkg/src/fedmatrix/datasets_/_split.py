import math
from typing import Tuple

import numpy as np

from .._errors import ContractError
from ._dataset import Dataset


def stratified_split(ds: Dataset, train_fraction: float) -> Tuple[Dataset, Dataset]:
    """
    按类别分层切分，保持行顺序

    每个类别取前 ``floor(train_fraction · n_c)`` 行进入训练集，其余进入验证集
    （两侧各至少保留 1 个样本）。两个结果互不相交，并集等于输入。

    Raises:
        ContractError: fraction 不在 (0, 1) 内，或某个类别少于 2 个样本
    """
    if not 0.0 < train_fraction < 1.0:
        raise ContractError(f"train_fraction must be in (0, 1), got {train_fraction}")

    train_idx = []
    for label, count in sorted(ds.class_counts().items()):
        if count < 2:
            raise ContractError(f"class {label} has {count} sample(s); stratified split needs at least 2")
        rows = np.flatnonzero(ds.labels == label)
        k = min(max(math.floor(train_fraction * count), 1), count - 1)
        train_idx.append(rows[:k])

    train_rows = np.sort(np.concatenate(train_idx))
    mask = np.zeros(len(ds), dtype=bool)
    mask[train_rows] = True
    return ds.subset(train_rows), ds.subset(np.flatnonzero(~mask))
