import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Literal, Tuple

import numpy as np

from .._errors import DimensionError
from ..numerics import ParameterVector, Tensor, as_parameter_vector
from ._config import ModelConfig


@dataclass(kw_only=True, frozen=True)
class ParamSpec:
    """One named block of the flattened parameter vector."""
    name: str
    shape: Tuple[int, ...]
    fan_in: int
    init: Literal["uniform", "ones", "zeros"] = "uniform"

    @property
    def size(self) -> int:
        return int(math.prod(self.shape))


@lru_cache(maxsize=32)
def parameter_layout(config: ModelConfig) -> Tuple[ParamSpec, ...]:
    d = config.num_features
    e = config.embed_dim
    h = config.num_heads
    dh = config.head_dim
    f = config.ff_hidden
    hh = config.head_hidden
    c = config.num_classes
    return (
        # per-feature affine embedding: token_i = x_i * w_i + b_i
        ParamSpec(name="embed.weight", shape=(d, e), fan_in=1),
        ParamSpec(name="embed.bias", shape=(d, e), fan_in=1),
        ParamSpec(name="attn.query", shape=(h, e, dh), fan_in=e),
        ParamSpec(name="attn.key", shape=(h, e, dh), fan_in=e),
        ParamSpec(name="attn.value", shape=(h, e, dh), fan_in=e),
        ParamSpec(name="attn.out", shape=(h, dh, e), fan_in=e),
        ParamSpec(name="attn.out_bias", shape=(e,), fan_in=e),
        ParamSpec(name="norm1.gain", shape=(e,), fan_in=e, init="ones"),
        ParamSpec(name="norm1.bias", shape=(e,), fan_in=e, init="zeros"),
        ParamSpec(name="ff.weight1", shape=(e, f), fan_in=e),
        ParamSpec(name="ff.bias1", shape=(f,), fan_in=e),
        ParamSpec(name="ff.weight2", shape=(f, e), fan_in=f),
        ParamSpec(name="ff.bias2", shape=(e,), fan_in=f),
        ParamSpec(name="norm2.gain", shape=(e,), fan_in=e, init="ones"),
        ParamSpec(name="norm2.bias", shape=(e,), fan_in=e, init="zeros"),
        ParamSpec(name="head.weight1", shape=(e, hh), fan_in=e),
        ParamSpec(name="head.bias1", shape=(hh,), fan_in=e),
        ParamSpec(name="head.weight2", shape=(hh, c), fan_in=hh),
        ParamSpec(name="head.bias2", shape=(c,), fan_in=hh),
    )


def parameter_count(config: ModelConfig) -> int:
    return sum(spec.size for spec in parameter_layout(config))


@dataclass(kw_only=True, frozen=True)
class ModelParams:
    """
    模型参数快照：配置 + 只读的扁平参数向量

    ``flatten`` / ``unflatten`` 按 ``parameter_layout`` 的固定顺序互逆。
    """
    config: ModelConfig
    vector: ParameterVector = field(repr=False)

    def __post_init__(self):
        vector = np.array(as_parameter_vector(self.vector), dtype=np.float64)
        expected = parameter_count(self.config)
        if vector.size != expected:
            raise DimensionError(f"model expects {expected} parameters, got {vector.size}")
        vector.flags.writeable = False
        object.__setattr__(self, "vector", vector)

    @classmethod
    def initialize(cls, config: ModelConfig, rng: np.random.Generator) -> "ModelParams":
        chunks = []
        for spec in parameter_layout(config):
            if spec.init == "ones":
                chunks.append(np.ones(spec.size))
            elif spec.init == "zeros":
                chunks.append(np.zeros(spec.size))
            else:
                bound = 1.0 / math.sqrt(spec.fan_in)
                chunks.append(rng.uniform(-bound, bound, size=spec.size))
        return cls(config=config, vector=np.concatenate(chunks))

    @classmethod
    def unflatten(cls, config: ModelConfig, vector: ParameterVector) -> "ModelParams":
        return cls(config=config, vector=vector)

    @classmethod
    def from_arrays(cls, config: ModelConfig, arrays: Dict[str, np.ndarray]) -> "ModelParams":
        chunks = []
        for spec in parameter_layout(config):
            if spec.name not in arrays:
                raise DimensionError(f"missing parameter block '{spec.name}'")
            block = np.asarray(arrays[spec.name], dtype=np.float64)
            if block.shape != spec.shape:
                raise DimensionError(f"parameter block '{spec.name}' expects {spec.shape}, got {block.shape}")
            chunks.append(block.ravel())
        return cls(config=config, vector=np.concatenate(chunks))

    @property
    def size(self) -> int:
        return int(self.vector.size)

    def flatten(self) -> ParameterVector:
        return self.vector.copy()

    def arrays(self) -> Dict[str, np.ndarray]:
        blocks = {}
        offset = 0
        for spec in parameter_layout(self.config):
            blocks[spec.name] = self.vector[offset:offset + spec.size].reshape(spec.shape)
            offset += spec.size
        return blocks

    def as_tensors(self, requires_grad: bool = False) -> Dict[str, Tensor]:
        return {
            name: Tensor.leaf(block, requires_grad=requires_grad)
            for name, block in self.arrays().items()
        }

    def with_vector(self, vector: ParameterVector) -> "ModelParams":
        return ModelParams(config=self.config, vector=vector)


def gather_gradient(config: ModelConfig, weights: Dict[str, Tensor]) -> ParameterVector:
    """Concatenate leaf gradients in layout order."""
    chunks = []
    for spec in parameter_layout(config):
        grad = weights[spec.name].grad
        chunks.append(np.zeros(spec.size) if grad is None else grad.ravel())
    return np.concatenate(chunks)
