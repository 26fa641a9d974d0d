import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from .._errors import ParseError
from ._config import ModelConfig
from ._params import ModelParams, parameter_count


CHECKPOINT_FORMAT = "fedmatrix.checkpoint"
CHECKPOINT_VERSION = 1


class CheckpointHeader(BaseModel):
    """
    检查点文件头

    文件布局（numpy ``.npz``）：
      - ``header``: UTF-8 编码的 JSON（本模型），以 uint8 数组存储
      - ``params``: float64 扁平参数向量，顺序见 ``parameter_layout``
    """
    format: str = Field(CHECKPOINT_FORMAT, description="文件格式标识")
    version: int = Field(CHECKPOINT_VERSION, description="文件格式版本")
    architecture: ModelConfig = Field(..., description="模型结构配置")
    num_params: int = Field(..., description="参数个数，加载时校验")
    seed: int = Field(..., description="产生该模型的根种子")
    round: int = Field(0, description="产生该模型的通信轮次，0 表示初始模型")
    metrics: Dict[str, float] = Field(default_factory=dict, description="该轮次的测试指标")


@dataclass(kw_only=True, frozen=True)
class Checkpoint:
    params: ModelParams
    seed: int
    round: int = 0
    metrics: Dict[str, float] = field(default_factory=dict)


def save_checkpoint(path: Union[str, Path], checkpoint: Checkpoint) -> Path:
    path = Path(path)
    header = CheckpointHeader(
        architecture=checkpoint.params.config,
        num_params=checkpoint.params.size,
        seed=checkpoint.seed,
        round=checkpoint.round,
        metrics=checkpoint.metrics,
    )
    raw_header = np.frombuffer(header.model_dump_json().encode("utf-8"), dtype=np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        np.savez(fh, header=raw_header, params=checkpoint.params.vector)
    logger.debug(f"saved checkpoint (round={checkpoint.round}) to {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as archive:
            raw_header = archive["header"].tobytes().decode("utf-8")
            vector = np.array(archive["params"], dtype=np.float64)
    except (OSError, KeyError, ValueError) as exc:
        raise ParseError(f"unreadable checkpoint: {exc}", path=str(path)) from exc

    try:
        header = CheckpointHeader.model_validate(json.loads(raw_header))
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ParseError(f"invalid checkpoint header: {exc}", path=str(path)) from exc

    if header.format != CHECKPOINT_FORMAT:
        raise ParseError(f"not a fedmatrix checkpoint (format={header.format!r})", path=str(path))
    if header.version != CHECKPOINT_VERSION:
        raise ParseError(f"unsupported checkpoint version {header.version}", path=str(path))
    expected = parameter_count(header.architecture)
    if header.num_params != expected or vector.size != expected:
        raise ParseError(
            f"parameter count mismatch: header={header.num_params} data={vector.size} expected={expected}",
            path=str(path),
        )

    return Checkpoint(
        params=ModelParams.unflatten(header.architecture, vector),
        seed=header.seed,
        round=header.round,
        metrics=dict(header.metrics),
    )
