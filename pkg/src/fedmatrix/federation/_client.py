from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .._errors import ContractError
from ..datasets_ import Dataset, stratified_split
from ..losses import LocalObjective, LossConfig
from ..metrics import minority_scores
from ..model_base import ModelParams, TabularTransformer
from ..numerics import ParameterVector, sgd_step


@dataclass(kw_only=True, frozen=True)
class ClientState:
    """
    单个客户端的本地状态

    Args:
        client_id: 客户端编号，从 0 开始
        train: 本地训练集
        val: 本地验证集（与训练集分层切分）
        local_params: 本轮训练得到的本地参数，未被选中时为 None
        last_f1: 最近一次对全局模型评估得到的少数类 F1
    """
    client_id: int
    train: Dataset = field(repr=False)
    val: Dataset = field(repr=False)
    local_params: Optional[ParameterVector] = field(default=None, repr=False)
    last_f1: Optional[float] = None

    @property
    def n_samples(self) -> int:
        """N_k：本地数据量（训练 + 验证）"""
        return len(self.train) + len(self.val)


def make_client_states(datasets: Sequence[Dataset], train_fraction: float = 0.8) -> List[ClientState]:
    states = []
    for client_id, ds in enumerate(datasets):
        if len(ds) == 0:
            raise ContractError(f"client {client_id} has no data")
        train, val = stratified_split(ds, train_fraction)
        states.append(ClientState(client_id=client_id, train=train, val=val))
    return states


def evaluate_local_f1(model: TabularTransformer, client: ClientState, global_params: ModelParams) -> float:
    """全局模型在客户端验证集上的少数类 F1"""
    if len(client.val) == 0:
        raise ContractError(f"client {client.client_id} has an empty validation set")
    predictions = model.predict(global_params, client.val.features)
    return minority_scores(predictions, client.val.labels).f1


def train_local(
    model: TabularTransformer,
    client: ClientState,
    global_params: ModelParams,
    mu: float,
    loss_config: LossConfig,
    *,
    epochs: int,
    batch_size: int,
    lr: float,
    rng: np.random.Generator,
) -> ParameterVector:
    """
    从全局参数出发，在本地目标（数据损失 + 近端项）上做 E 个 epoch 的小批量 SGD

    每个 epoch 用 ``rng`` 重新打乱训练集；近端项中的全局快照在整个本地训练中保持不变。
    """
    if len(client.train) == 0:
        raise ContractError(f"client {client.client_id} has an empty training set")
    if epochs == 0 or lr == 0.0:
        return global_params.flatten()

    objective = LocalObjective(loss_config, global_params, mu)
    features, labels = client.train.features, client.train.labels
    params = global_params
    for _ in range(epochs):
        order = rng.permutation(len(client.train))
        for start in range(0, order.size, batch_size):
            batch = order[start:start + batch_size]
            _, grad = objective.value_and_grad(model, params, features[batch], labels[batch])
            params = params.with_vector(sgd_step(params.vector, grad, lr))
    return params.flatten()
