from typing import List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, Field

from ..._errors import DimensionError
from ...datasets_ import Dataset, generate_synthetic, load_csv
from ...experiment import ExperimentConfig
from ...federation import Federation, FederationConfig, SelectorProvider, TrainingResult
from ...losses import LossConfig
from ...model_base import TabularTransformer


class TrainingSummary(BaseModel):
    """一次训练运行的摘要：最优轮次及其测试指标"""
    strategy: str
    loss: str
    rounds: int
    best_round: int = Field(..., description="测试集 F1 最高的通信轮次，0 表示初始模型")
    best_recall: float
    best_precision: float
    best_f1: float
    final_f1: Optional[float] = None
    dataset_hash: str

    @classmethod
    def from_result(
        cls,
        result: TrainingResult,
        federation_config: FederationConfig,
        loss_config: LossConfig,
        dataset_hash: str,
    ) -> "TrainingSummary":
        best = result.best.metrics
        return cls(
            strategy=federation_config.strategy_label,
            loss=loss_config.kind.value,
            rounds=len(result.records),
            best_round=result.best_round,
            best_recall=best["recall"],
            best_precision=best["precision"],
            best_f1=best["f1"],
            final_f1=result.records[-1].test.f1 if result.records else None,
            dataset_hash=dataset_hash,
        )


def _check_features(ds: Dataset, config: ExperimentConfig, source: str) -> Dataset:
    if ds.num_features != config.num_features:
        raise DimensionError(f"{source} has {ds.num_features} features, config expects {config.num_features}")
    return ds


def load_client_dataset(config: ExperimentConfig, client_id: int) -> Dataset:
    """只读取一个客户端的本地数据"""
    if config.client_csvs is not None:
        path = config.client_csvs[client_id]
        return _check_features(load_csv(path), config, path)
    clients, _ = generate_synthetic(config.to_synthetic_spec())
    return clients[client_id]


def load_federated_data(config: ExperimentConfig) -> Tuple[List[Dataset], Dataset]:
    """配置中给出 CSV 时只读取这些文件，否则按合成数据设置生成"""
    if config.client_csvs is None:
        return generate_synthetic(config.to_synthetic_spec())

    clients = []
    names = None
    for path in config.client_csvs:
        ds = _check_features(load_csv(path, names), config, path)
        names = ds.feature_names
        clients.append(ds)
    test = _check_features(load_csv(config.test_csv, names), config, config.test_csv)
    logger.info(f"Loaded {len(clients)} client datasets and a test set of {len(test)} rows from CSV")
    return clients, test


def build_federation(
    config: ExperimentConfig,
    clients: List[Dataset],
    test: Dataset,
    *,
    federation_config: Optional[FederationConfig] = None,
    loss_config: Optional[LossConfig] = None,
    selector_provider: Optional[SelectorProvider] = None,
) -> Federation:
    federation_config = federation_config or config.to_federation_config()
    selector = None
    if selector_provider is not None:
        selector = selector_provider(federation_config.selection_strategy.value)
    return Federation(
        federation_config,
        TabularTransformer(config.to_architecture()),
        loss_config or config.to_loss_config(),
        clients,
        test,
        scheme=config.to_scheme_params(),
        selector=selector,
    )
