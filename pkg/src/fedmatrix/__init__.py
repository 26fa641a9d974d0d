from .__about__ import __version__
from ._errors import (
    FedMatrixError,
    DimensionError,
    ContractError,
    NumericsError,
    ParameterError,
    RangeError,
    ConfigError,
    ParseError,
)
from ._fedmatrix import FedMatrix
from .datasets_ import Dataset, SyntheticSpec, generate_synthetic, stratified_split, load_csv, write_csv
from .model_base import ModelConfig, ModelParams, TabularTransformer, Checkpoint, save_checkpoint, load_checkpoint
from .losses import LossConfig, LossKind
from .federation import Federation, FederationConfig, FederationStrategy, RoundRecord, TrainingResult
from .secure_agg import SchemeParams, SecureAggregator
from .explain import IGConfig, AttributionReport, IntegratedGradients
from .experiment import ExperimentConfig, load_experiment_config

__all__ = [
    "__version__",
    "FedMatrix",
    "FedMatrixError",
    "DimensionError",
    "ContractError",
    "NumericsError",
    "ParameterError",
    "RangeError",
    "ConfigError",
    "ParseError",
    "Dataset",
    "SyntheticSpec",
    "generate_synthetic",
    "stratified_split",
    "load_csv",
    "write_csv",
    "ModelConfig",
    "ModelParams",
    "TabularTransformer",
    "Checkpoint",
    "save_checkpoint",
    "load_checkpoint",
    "LossConfig",
    "LossKind",
    "Federation",
    "FederationConfig",
    "FederationStrategy",
    "RoundRecord",
    "TrainingResult",
    "SchemeParams",
    "SecureAggregator",
    "IGConfig",
    "AttributionReport",
    "IntegratedGradients",
    "ExperimentConfig",
    "load_experiment_config",
]
