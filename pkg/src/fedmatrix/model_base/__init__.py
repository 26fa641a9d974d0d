from ._config import ModelConfig
from ._params import ModelParams, ParamSpec, parameter_layout, parameter_count, gather_gradient
from ._transformer import TabularTransformer, AttentionMatrix, ForwardOutput
from ._checkpoint import Checkpoint, CheckpointHeader, save_checkpoint, load_checkpoint


__all__ = [
    "ModelConfig",
    "ModelParams",
    "ParamSpec",
    "parameter_layout",
    "parameter_count",
    "gather_gradient",
    "TabularTransformer",
    "AttentionMatrix",
    "ForwardOutput",
    "Checkpoint",
    "CheckpointHeader",
    "save_checkpoint",
    "load_checkpoint",
]
