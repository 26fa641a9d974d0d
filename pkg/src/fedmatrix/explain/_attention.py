from typing import Optional

import numpy as np

from .._errors import ContractError
from ..datasets_ import Dataset
from ..model_base import ModelParams, TabularTransformer
from ._report import AttentionReport


def class_attention_report(
    model: TabularTransformer,
    params: ModelParams,
    dataset: Dataset,
    label: int,
    *,
    sample_cap: int = 2000,
    rng: Optional[np.random.Generator] = None,
) -> AttentionReport:
    """某一类样本的平均注意力（对样本与头取平均）"""
    rows = np.flatnonzero(dataset.labels == label)
    if rows.size == 0:
        raise ContractError(f"dataset has no samples of class {label}")
    if rows.size > sample_cap:
        rng = rng if rng is not None else np.random.default_rng(0)
        rows = np.sort(rng.choice(rows, size=sample_cap, replace=False))

    raw = model.average_attention(params, dataset.features[rows], normalize=False)
    normalized = raw.normalize()
    return AttentionReport(
        feature_names=list(dataset.feature_names),
        sample_class=int(label),
        sample_count=raw.sample_count,
        raw=raw.scores.tolist(),
        normalized=normalized.scores.tolist(),
    )
