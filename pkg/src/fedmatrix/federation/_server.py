import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

import pandas as pd
from loguru import logger

from .._errors import ContractError, DimensionError
from ..datasets_ import Dataset
from ..losses import LossConfig
from ..metrics import BinaryScores, minority_scores
from ..model_base import Checkpoint, ModelParams, TabularTransformer
from ..secure_agg import SchemeParams, SecureAggregator
from ..utils import substream
from ._aggregation import aggregate_encrypted, aggregate_plaintext, compute_gamma
from ._client import ClientState, evaluate_local_f1, make_client_states, train_local
from ._config import AggregationMode, FederationConfig
from ._schedule import mu_for_round
from ._selection import BUILTIN_SELECTORS, ClientSelector


T = TypeVar("T")

ROUND_LOG_COLUMNS = (
    "round", "mu", "strategy", "selected_ids", "gamma_values",
    "test_recall", "test_precision", "test_f1", "duration_ms",
)


@dataclass(kw_only=True, frozen=True)
class FederationState:
    """服务器视角的训练状态：已完成的轮数、全局参数与各客户端状态"""
    round: int
    global_params: ModelParams
    clients: Tuple[ClientState, ...]


@dataclass(kw_only=True, frozen=True)
class RoundRecord:
    round: int
    mu: float
    strategy: str
    selected_ids: Tuple[int, ...]
    gammas: Dict[int, float]
    client_f1: Dict[int, float]
    test: BinaryScores
    duration_ms: float

    def as_row(self) -> Dict[str, Union[int, float, str]]:
        return {
            "round": self.round,
            "mu": self.mu,
            "strategy": self.strategy,
            "selected_ids": ";".join(str(i) for i in self.selected_ids),
            "gamma_values": ";".join(repr(self.gammas[i]) for i in self.selected_ids),
            "test_recall": self.test.recall,
            "test_precision": self.test.precision,
            "test_f1": self.test.f1,
            "duration_ms": self.duration_ms,
        }


@dataclass(kw_only=True, frozen=True)
class TrainingResult:
    records: List[RoundRecord]
    best: Checkpoint
    final_state: FederationState = field(repr=False)

    @property
    def best_round(self) -> int:
        return self.best.round


def round_log_frame(records: Sequence[RoundRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in records], columns=list(ROUND_LOG_COLUMNS))


def write_round_log(records: Sequence[RoundRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    round_log_frame(records).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


class Federation:
    """
    通信轮循环：

      1. 服务器把全局参数 w^t 下发给全部 K 个客户端
      2. 每个客户端在本地验证集上评估 w^t 的 F1，服务器按策略选出 M 个客户端
      3. 被选中的客户端以 w^t 为近端锚点做本地训练
      4. 加密模式下客户端用公钥加密本地参数
      5. 服务器按 γ_k 加权聚合
      6. 聚合结果成为 w^{t+1}，并在全局测试集上计算指标
    """

    def __init__(
        self,
        config: FederationConfig,
        model: TabularTransformer,
        loss_config: LossConfig,
        clients: Sequence[Dataset],
        test: Dataset,
        *,
        scheme: Optional[SchemeParams] = None,
        selector: Optional[ClientSelector] = None,
    ):
        if len(clients) != config.num_clients:
            raise ContractError(f"config expects {config.num_clients} clients, got {len(clients)} datasets")
        for ds in [*clients, test]:
            if ds.num_features != model.config.num_features:
                raise DimensionError(
                    f"dataset has {ds.num_features} features, model expects {model.config.num_features}"
                )
        if len(test) == 0:
            raise ContractError("test set is empty")

        self.config = config
        self.model = model
        self.loss_config = loss_config
        self.datasets = list(clients)
        self.test = test
        self.selector = selector or BUILTIN_SELECTORS[config.selection_strategy.value]
        self.aggregator: Optional[SecureAggregator] = None
        if config.aggregation_mode == AggregationMode.ENCRYPTED:
            self.aggregator = SecureAggregator(scheme, seed=config.seed)

    def init_state(self) -> FederationState:
        params = self.model.init_params(substream(self.config.seed, "model", "init"))
        clients = make_client_states(self.datasets, self.config.train_fraction)
        return FederationState(round=0, global_params=params, clients=tuple(clients))

    def _map_clients(self, fn: Callable[[ClientState], T], clients: Sequence[ClientState]) -> List[T]:
        if self.config.num_workers == 1 or len(clients) <= 1:
            return [fn(c) for c in clients]
        with ThreadPoolExecutor(max_workers=self.config.num_workers) as pool:
            return list(pool.map(fn, clients))

    def test_scores(self, params: ModelParams) -> BinaryScores:
        predictions = self.model.predict(params, self.test.features)
        return minority_scores(predictions, self.test.labels)

    def run_round(self, state: FederationState) -> Tuple[FederationState, RoundRecord]:
        started = time.perf_counter()
        t = state.round + 1
        cfg = self.config
        # the schedule is indexed from 0, so the first round trains with mu_0
        mu = mu_for_round(state.round, cfg)
        w_t = state.global_params

        # (1)-(2) dispatch and local evaluation on every client
        f1_values = self._map_clients(lambda c: evaluate_local_f1(self.model, c, w_t), state.clients)
        f1_by_client = {c.client_id: f1 for c, f1 in zip(state.clients, f1_values)}
        selected = self.selector(f1_by_client, cfg.num_selected, substream(cfg.seed, "select", t))
        selected = tuple(sorted(selected))
        if len(set(selected)) != cfg.num_selected or not set(selected) <= set(f1_by_client):
            raise ContractError(f"selector returned {list(selected)}, expected {cfg.num_selected} distinct client ids")

        # (3) local training on the selected clients
        chosen = [c for c in state.clients if c.client_id in selected]
        trained = self._map_clients(
            lambda c: train_local(
                self.model, c, w_t, mu, self.loss_config,
                epochs=cfg.local_epochs,
                batch_size=cfg.batch_size,
                lr=cfg.lr,
                rng=substream(cfg.seed, "train", t, c.client_id),
            ),
            chosen,
        )
        updates = {c.client_id: w for c, w in zip(chosen, trained)}

        # (4)-(5) weighted aggregation
        gammas = compute_gamma({c.client_id: c.n_samples for c in chosen})
        if self.aggregator is not None:
            new_vector = aggregate_encrypted(self.aggregator, updates, gammas, round_index=t)
        else:
            new_vector = aggregate_plaintext(updates, gammas)

        # (6) new global model
        new_params = w_t.with_vector(new_vector)
        scores = self.test_scores(new_params)
        clients = tuple(
            replace(c, last_f1=f1_by_client[c.client_id], local_params=updates.get(c.client_id))
            for c in state.clients
        )
        record = RoundRecord(
            round=t,
            mu=mu,
            strategy=cfg.strategy_label,
            selected_ids=tuple(selected),
            gammas=gammas,
            client_f1=f1_by_client,
            test=scores,
            duration_ms=(time.perf_counter() - started) * 1000.0 if cfg.durations_recorded else 0.0,
        )
        logger.info(
            f"round {t}: mu={mu:.4f} selected={list(selected)} "
            f"test_f1={scores.f1:.4f} recall={scores.recall:.4f} precision={scores.precision:.4f}"
        )
        return FederationState(round=t, global_params=new_params, clients=clients), record

    def run_training(
        self,
        state: Optional[FederationState] = None,
        *,
        on_round: Optional[Callable[[RoundRecord], None]] = None,
    ) -> TrainingResult:
        """
        运行 τ 轮并保留测试集 F1 最高的全局模型（F1 相同时保留最早的一轮）

        Returns:
            TrainingResult，包含全部轮次记录与最优模型检查点
        """
        state = state or self.init_state()
        initial = self.test_scores(state.global_params)
        best = Checkpoint(
            params=state.global_params, seed=self.config.seed, round=state.round, metrics=initial.as_dict(),
        )

        records: List[RoundRecord] = []
        for _ in range(self.config.rounds):
            state, record = self.run_round(state)
            records.append(record)
            if on_round is not None:
                on_round(record)
            if record.test.f1 > best.metrics["f1"]:
                best = Checkpoint(
                    params=state.global_params, seed=self.config.seed, round=record.round,
                    metrics=record.test.as_dict(),
                )

        logger.info(f"training finished after {len(records)} round(s); best round {best.round} f1={best.metrics['f1']:.4f}")
        return TrainingResult(records=records, best=best, final_state=state)
