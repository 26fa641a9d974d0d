from ._config import LossConfig, LossKind
from ._losses import weighted_nll, focal_loss, data_loss, proximal_penalty
from ._objective import LocalObjective, local_objective


__all__ = [
    "LossConfig",
    "LossKind",
    "weighted_nll",
    "focal_loss",
    "data_loss",
    "proximal_penalty",
    "LocalObjective",
    "local_objective",
]
