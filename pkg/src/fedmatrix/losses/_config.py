from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class LossKind(str, Enum):
    WEIGHTED_NLL = "weighted-nll"
    # identical to weighted-nll on log-softmax outputs; kept as its own name for comparisons
    CROSS_ENTROPY = "cross-entropy"
    FOCAL = "focal"


class LossConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: LossKind = Field(LossKind.WEIGHTED_NLL, description="训练目标：weighted-nll | cross-entropy | focal")
    class_weights: Tuple[float, float] = Field(
        (0.25, 0.75),
        description="类别权重 β_c，依次为多数类（未违约）与少数类（违约）",
    )
    focal_gamma: float = Field(2.0, ge=0.0, description="Focal loss 的聚焦指数 γ")

    @field_validator("class_weights")
    @classmethod
    def _positive_weights(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if any(w <= 0 for w in value):
            raise ValueError(f"class weights must be > 0, got {value}")
        return value
