from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .._errors import DimensionError


class IGConfig(BaseModel):
    """积分梯度的设置"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    baseline: Optional[Tuple[float, ...]] = Field(None, description="基线输入 x′，为空时取全零向量")
    steps: int = Field(64, description="路径上的 Riemann 步数 m")
    target: int = Field(1, ge=0, le=1, description="被归因的类别，默认 1（违约）")
    batch_size: int = Field(4096, ge=1, description="每次前向/反向传播的路径点数上限")
    sample_cap: int = Field(2000, ge=1, description="按类别汇总时最多抽取的样本数")

    @property
    def baseline_kind(self) -> str:
        return "zero" if self.baseline is None else "custom"

    def baseline_vector(self, num_features: int) -> np.ndarray:
        if self.baseline is None:
            return np.zeros(num_features)
        baseline = np.asarray(self.baseline, dtype=np.float64)
        if baseline.shape != (num_features,):
            raise DimensionError(f"baseline has {baseline.size} values, expected {num_features}")
        return baseline
