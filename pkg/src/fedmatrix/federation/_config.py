import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class MuMode(str, Enum):
    VARYING = "varying"
    FIXED = "fixed"
    NONE = "none"


class SelectionStrategy(str, Enum):
    PBCS = "pbcs"
    RANDOM = "random"


class AggregationMode(str, Enum):
    ENCRYPTED = "encrypted"
    PLAINTEXT = "plaintext"


class FederationConfig(BaseModel):
    """联邦训练超参数，默认值取自桌面规模的基准设置"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    num_clients: int = Field(4, ge=1, description="客户端数量 K")
    selection_ratio: float = Field(0.5, gt=0.0, le=1.0, description="每轮参与训练的客户端比例 r")
    rounds: int = Field(50, ge=0, description="通信轮数 τ")
    local_epochs: int = Field(5, ge=0, description="每轮本地训练的 epoch 数 E")
    batch_size: int = Field(64, ge=1, description="本地 SGD 的批大小")
    lr: float = Field(0.01, ge=0.0, description="本地 SGD 学习率")
    mu_step: float = Field(0.0002, ge=0.0, description="近端系数 μ 每轮的增量")
    mu_cap: float = Field(0.01, ge=0.0, description="近端系数 μ 的上限")
    mu_mode: MuMode = Field(MuMode.VARYING, description="varying：随轮次递增；fixed：恒为 mu_cap；none：恒为 0")
    selection_strategy: SelectionStrategy = Field(SelectionStrategy.PBCS, description="pbcs | random")
    aggregation_mode: AggregationMode = Field(AggregationMode.ENCRYPTED, description="encrypted | plaintext")
    train_fraction: float = Field(0.8, gt=0.0, lt=1.0, description="本地数据中训练集所占比例，其余为验证集")
    seed: int = Field(0, ge=0, description="根种子")
    num_workers: int = Field(1, ge=1, description="并行执行客户端评估与本地训练的线程数")
    record_durations: Optional[bool] = Field(
        None, description="轮次日志是否记录耗时；未设置时仅加密模式记录，明文模式记为 0 以保证日志逐字节可复现"
    )

    @property
    def num_selected(self) -> int:
        """M = ceil(r·K)"""
        # guard against r·K landing a hair above an integer
        return max(1, math.ceil(round(self.selection_ratio * self.num_clients, 9)))

    @property
    def durations_recorded(self) -> bool:
        if self.record_durations is None:
            return self.aggregation_mode == AggregationMode.ENCRYPTED
        return self.record_durations

    @property
    def strategy_label(self) -> str:
        return f"{self.selection_strategy.value}/{self.mu_mode.value}"


class FederationStrategy(str, Enum):
    """对比实验中的三种联邦训练方案"""
    PBCS_PROX = "pbcs-prox"
    FEDPROX = "fedprox"
    FEDAVG = "fedavg"

    def apply(self, config: FederationConfig) -> FederationConfig:
        selection, mu_mode = _STRATEGY_SETTINGS[self]
        return config.model_copy(update={"selection_strategy": selection, "mu_mode": mu_mode})


_STRATEGY_SETTINGS = {
    FederationStrategy.PBCS_PROX: (SelectionStrategy.PBCS, MuMode.VARYING),
    FederationStrategy.FEDPROX: (SelectionStrategy.RANDOM, MuMode.FIXED),
    FederationStrategy.FEDAVG: (SelectionStrategy.RANDOM, MuMode.NONE),
}
