from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np

from ..model_base import ModelParams, TabularTransformer
from ..numerics import ParameterVector, Tensor
from ._config import LossConfig
from ._losses import data_loss, proximal_penalty


class LocalObjective:
    """
    FedProx client objective ``g_k(w) = F_k(w) + (μ/2)·‖w − w^t‖²``.

    ``F_k`` is the configured data loss averaged over the batch; ``w^t`` is the
    dispatched global snapshot and stays fixed for the whole local run.
    """

    def __init__(self, loss_config: LossConfig, global_snapshot: ModelParams, mu: float):
        self.loss_config = loss_config
        self.mu = float(mu)
        self._global_blocks: Dict[str, np.ndarray] = global_snapshot.arrays()

    def __call__(self, log_probs: Tensor, weights: Mapping[str, Tensor], labels: Sequence[int]) -> Tensor:
        loss = data_loss(log_probs, labels, self.loss_config, reduction="mean")
        if self.mu > 0.0:
            loss = loss + proximal_penalty(weights, self._global_blocks, self.mu)
        return loss

    def value_and_grad(
        self,
        model: TabularTransformer,
        params: ModelParams,
        features: np.ndarray,
        labels: np.ndarray,
    ) -> Tuple[float, ParameterVector]:
        return model.value_and_grad(params, features, lambda lp, w: self(lp, w, labels))


def local_objective(
    model: TabularTransformer,
    params: Union[ModelParams, Mapping[str, Tensor]],
    features: np.ndarray,
    labels: np.ndarray,
    global_snapshot: ModelParams,
    loss_config: LossConfig,
    mu: float,
) -> Tensor:
    weights = params.as_tensors(requires_grad=True) if isinstance(params, ModelParams) else params
    log_probs = model.forward(features, weights).log_probs
    return LocalObjective(loss_config, global_snapshot, mu)(log_probs, weights, labels)
