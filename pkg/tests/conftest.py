from typing import Callable

import numpy as np
import pytest
import yaml

from fedmatrix.datasets_ import SyntheticSpec, generate_synthetic
from fedmatrix.model_base import ModelConfig, TabularTransformer


@pytest.fixture
def tiny_config() -> ModelConfig:
    return ModelConfig(num_features=5, embed_dim=6, num_heads=2, ff_hidden=8, head_hidden=4)


@pytest.fixture
def tiny_model(tiny_config) -> TabularTransformer:
    return TabularTransformer(tiny_config)


@pytest.fixture
def tiny_params(tiny_model):
    return tiny_model.init_params(np.random.default_rng(11))


@pytest.fixture
def tiny_spec() -> SyntheticSpec:
    return SyntheticSpec(
        num_clients=3,
        sample_sizes=(120, 100, 90),
        minority_rates=(0.2, 0.25, 0.3),
        num_features=5,
        num_binary_features=1,
        seed=7,
    )


@pytest.fixture
def tiny_data(tiny_spec):
    return generate_synthetic(tiny_spec)


def central_difference(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Elementwise central-difference gradient of a scalar function."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for index in np.ndindex(x.shape):
        step = np.zeros_like(x)
        step[index] = h
        grad[index] = (f(x + step) - f(x - step)) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / denom)


# a two-client, five-feature experiment that runs in well under a second per round
TINY_SETTINGS = {
    "num_clients": 2,
    "sample_sizes": [60, 60],
    "minority_rates": [0.2, 0.25],
    "num_features": 5,
    "num_binary_features": 1,
    "embed_dim": 4,
    "num_heads": 2,
    "ff_hidden": 4,
    "head_hidden": 4,
    "rounds": 1,
    "local_epochs": 1,
    "batch_size": 16,
    "aggregation_mode": "plaintext",
    "ig_steps": 8,
    "log_level": "WARNING",
}


@pytest.fixture
def tiny_config_file(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(TINY_SETTINGS), encoding="utf-8")
    return path
