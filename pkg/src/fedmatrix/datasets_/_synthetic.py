import math
from typing import List, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .._errors import ContractError
from ..utils import substream
from ._dataset import Dataset
from ._split import stratified_split


DEFAULT_FEATURE_NAMES: Tuple[str, ...] = (
    "credit_rating",
    "guarantee_type",
    "revolving_credit_facility",
    "small_and_micro_enterprises",
    "bank_early_warning",
    "years_relationship_with_bank",
    "government_platform_finance",
    "prohibited_industry",
    "repayment_method",
    "platform_type",
    "loan_amount",
    "loan_term_months",
    "interest_rate",
    "registered_capital",
    "annual_revenue",
    "debt_to_asset_ratio",
    "supplier_concentration",
    "accounts_receivable_days",
    "years_in_operation",
    "overdue_history",
    "collateral_coverage",
)


def feature_names_for(num_features: int) -> Tuple[str, ...]:
    """前 d 个默认特征名，超出部分补 ``feature_<i>``"""
    names = list(DEFAULT_FEATURE_NAMES[:num_features])
    names.extend(f"feature_{i}" for i in range(len(names), num_features))
    return tuple(names)


class SyntheticSpec(BaseModel):
    """多客户端 Non-IID 不平衡合成数据的生成参数"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_clients: int = Field(default=4, ge=1, description="客户端数量 K")
    sample_sizes: Tuple[int, ...] = Field(
        default=(1148, 1244, 1176, 840), description="每个客户端的样本总数（含测试切片）"
    )
    minority_rates: Tuple[float, ...] = Field(
        default=(0.1175, 0.1245, 0.1404, 0.1352), description="每个客户端的违约（少数类）比例"
    )
    num_features: int = Field(default=21, ge=1, description="特征维度 d")
    shift_magnitude: float = Field(default=1.0, ge=0.0, description="客户端特征均值偏移幅度，0 表示 IID")
    class_separation: float = Field(default=2.0, ge=0.0, description="两类均值之间的欧氏距离")
    num_binary_features: int = Field(default=4, ge=0, description="末尾经阈值化变为 0/1 的特征个数")
    test_fraction: float = Field(default=0.2, gt=0.0, lt=1.0, description="每个客户端划入全局测试集的比例")
    seed: int = Field(default=0, ge=0, description="数据生成种子")

    @model_validator(mode="after")
    def _check_clients(self) -> "SyntheticSpec":
        if len(self.sample_sizes) != self.num_clients:
            raise ValueError(f"sample_sizes has {len(self.sample_sizes)} entries for {self.num_clients} clients")
        if len(self.minority_rates) != self.num_clients:
            raise ValueError(f"minority_rates has {len(self.minority_rates)} entries for {self.num_clients} clients")
        if any(size <= 0 for size in self.sample_sizes):
            raise ValueError("sample sizes must be positive")
        if any(not 0.0 < rate < 0.5 for rate in self.minority_rates):
            raise ValueError("minority rates must lie in (0, 0.5)")
        if self.num_binary_features >= self.num_features:
            raise ValueError("num_binary_features must be smaller than num_features")
        return self

    @property
    def feature_names(self) -> Tuple[str, ...]:
        return feature_names_for(self.num_features)


def minority_count(rate: float, size: int) -> int:
    """四舍五入到最近整数，至少为 1"""
    return max(1, math.floor(rate * size + 0.5))


def _client_shift(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    d = spec.num_features
    shift = np.zeros(d)
    if spec.shift_magnitude == 0.0:
        return shift
    chosen = rng.choice(d, size=math.ceil(d / 2), replace=False)
    signs = rng.choice((-1.0, 1.0), size=chosen.size)
    shift[chosen] = spec.shift_magnitude * signs
    return shift


def _generate_client(spec: SyntheticSpec, client_id: int, class_offset: np.ndarray) -> Dataset:
    size = spec.sample_sizes[client_id]
    n_minority = minority_count(spec.minority_rates[client_id], size)
    n_majority = size - n_minority
    # each class must survive the test slice and the later train/val split
    if n_minority < 3 or n_majority < 3:
        raise ContractError(
            f"client {client_id}: infeasible class counts (majority={n_majority}, minority={n_minority}); "
            f"each class needs at least 3 samples"
        )

    rng = substream(spec.seed, "data", "client", client_id)
    shift = _client_shift(spec, rng)
    d = spec.num_features
    majority = rng.standard_normal((n_majority, d)) + shift
    minority = rng.standard_normal((n_minority, d)) + shift + class_offset

    features = np.concatenate([majority, minority], axis=0)
    labels = np.concatenate([np.zeros(n_majority, dtype=np.int64), np.ones(n_minority, dtype=np.int64)])
    if spec.num_binary_features:
        features[:, d - spec.num_binary_features:] = (features[:, d - spec.num_binary_features:] > 0.0)

    order = rng.permutation(size)
    return Dataset(features=features[order], labels=labels[order], feature_names=spec.feature_names)


def generate_synthetic(spec: SyntheticSpec) -> Tuple[List[Dataset], Dataset]:
    """
    生成每个客户端的数据集以及全局测试集

    每个客户端按类别条件高斯分布采样，并在随机一半特征上叠加客户端特有的均值偏移；
    每个客户端的 ``test_fraction`` 分层切片被移出并合并为全局测试集。

    Returns:
        (clients, test)，clients 按客户端 id 排列
    """
    structure_rng = substream(spec.seed, "data", "structure")
    direction = structure_rng.standard_normal(spec.num_features)
    class_offset = spec.class_separation * direction / np.linalg.norm(direction)

    clients: List[Dataset] = []
    test_parts: List[Dataset] = []
    for client_id in range(spec.num_clients):
        full = _generate_client(spec, client_id, class_offset)
        local, test_slice = stratified_split(full, 1.0 - spec.test_fraction)
        clients.append(local)
        test_parts.append(test_slice)
        logger.debug(
            f"client {client_id}: {len(local)} local samples, {len(test_slice)} test samples, "
            f"minority rate {full.minority_rate:.4f}"
        )

    test = Dataset.concat(test_parts)
    logger.info(f"Generated {spec.num_clients} synthetic clients and a test set of {len(test)} samples")
    return clients, test
