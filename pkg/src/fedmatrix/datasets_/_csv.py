from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger

from .._errors import ParseError
from ._dataset import Dataset


LABEL_COLUMN = "label"

PathLike = Union[str, Path]


def write_csv(ds: Dataset, path: PathLike) -> Path:
    """写出 UTF-8 CSV，表头为特征名 + ``label``，实数保留 17 位有效数字"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(np.asarray(ds.features), columns=list(ds.feature_names))
    frame[LABEL_COLUMN] = np.asarray(ds.labels)
    frame.to_csv(path, index=False, float_format="%.17g", encoding="utf-8", lineterminator="\n")
    logger.debug(f"Wrote {len(ds)} rows to {path}")
    return path


def _parse_column(values: np.ndarray, column: str, path: str) -> np.ndarray:
    try:
        parsed = values.astype(np.float64)
    except ValueError:
        parsed = None
    if parsed is not None and np.all(np.isfinite(parsed)):
        return parsed
    for i, cell in enumerate(values):
        try:
            number = float(cell)
        except ValueError:
            raise ParseError(f"non-numeric cell {cell!r}", path=path, row=i + 1, column=column) from None
        if not np.isfinite(number):
            raise ParseError(f"non-finite cell {cell!r}", path=path, row=i + 1, column=column)
    raise ParseError("unparseable column", path=path, column=column)


def load_csv(path: PathLike, feature_names: Optional[Sequence[str]] = None) -> Dataset:
    """
    读取带表头的 CSV 为 Dataset，保持行顺序

    Args:
        path: CSV 文件路径
        feature_names: 期望的特征列（schema）；为空时使用表头中除 ``label`` 外的所有列

    Raises:
        ParseError: 文件为空、缺少列、单元格非数值或标签不在 {0, 1} 内，行号从 1 开始计数（不含表头）
    """
    source = str(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise ParseError("empty file", path=source) from None
    except pd.errors.ParserError as exc:
        raise ParseError(f"malformed CSV: {exc}", path=source) from None

    columns = [str(c).strip() for c in frame.columns]
    frame.columns = columns
    if LABEL_COLUMN not in columns:
        raise ParseError("missing label column", path=source, column=LABEL_COLUMN)
    if feature_names is None:
        feature_names = [c for c in columns if c != LABEL_COLUMN]
    else:
        feature_names = list(feature_names)
        for name in feature_names:
            if name not in columns:
                raise ParseError("missing feature column", path=source, column=name)
        unexpected = [c for c in columns if c != LABEL_COLUMN and c not in feature_names]
        if unexpected:
            raise ParseError(f"unexpected column(s) {unexpected}", path=source, column=unexpected[0])
    if not feature_names:
        raise ParseError("no feature columns", path=source)
    if frame.empty:
        raise ParseError("no data rows", path=source)

    features = np.column_stack(
        [_parse_column(frame[name].to_numpy(dtype=str), name, source) for name in feature_names]
    )

    raw_labels = frame[LABEL_COLUMN].to_numpy(dtype=str)
    labels = np.empty(raw_labels.size, dtype=np.int64)
    for i, cell in enumerate(raw_labels):
        token = cell.strip()
        if token not in ("0", "1"):
            raise ParseError(f"label {cell!r} is not 0 or 1", path=source, row=i + 1, column=LABEL_COLUMN)
        labels[i] = int(token)

    logger.debug(f"Loaded {labels.size} rows × {len(feature_names)} features from {source}")
    return Dataset(features=features, labels=labels, feature_names=tuple(feature_names))
