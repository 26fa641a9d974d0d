import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .._errors import ContractError, DimensionError
from ..numerics import (
    ParameterVector,
    Tensor,
    backward,
    gelu,
    layer_norm,
    log_softmax,
    softmax,
)
from ._config import ModelConfig
from ._params import ModelParams, gather_gradient


Weights = Mapping[str, Tensor]
ParamsLike = Union[ModelParams, Weights]
LossFn = Callable[[Tensor, Weights], Tensor]


@dataclass(kw_only=True, frozen=True)
class AttentionMatrix:
    """
    d × d 注意力分数

    ``head_index`` 为 None 时表示对头（以及样本）取过平均；
    ``normalized`` 为 True 时分数已按 min-max 仿射映射到 [-1, 1]。
    """
    scores: np.ndarray = field(repr=False)
    head_index: Optional[int] = None
    averaged: bool = False
    normalized: bool = False
    sample_count: int = 1

    @property
    def size(self) -> int:
        return int(self.scores.shape[0])

    def normalize(self) -> "AttentionMatrix":
        lo = float(self.scores.min())
        hi = float(self.scores.max())
        if hi == lo:
            logger.warning("attention matrix is constant, normalizing to zeros")
            scaled = np.zeros_like(self.scores)
        else:
            scaled = 2.0 * (self.scores - lo) / (hi - lo) - 1.0
            # exact endpoints regardless of rounding
            scaled[self.scores == lo] = -1.0
            scaled[self.scores == hi] = 1.0
        return replace(self, scores=scaled, normalized=True)


@dataclass(kw_only=True, frozen=True)
class ForwardOutput:
    log_probs: Tensor
    attention: Tensor  # (batch, heads, d, d)


class TabularTransformer:
    """
    逐特征 token 化的表格 Transformer 分类器

    特征嵌入 → 一个编码器块（多头自注意力 + 前馈 + 残差 + 层归一化）
    → token 均值池化 → 全连接分类头 → 两类对数概率。没有位置编码。
    """

    def __init__(self, config: ModelConfig):
        self.config = config
        self._scale = 1.0 / math.sqrt(config.head_dim)

    def __repr__(self) -> str:
        return f"TabularTransformer({self.config!r})"

    def init_params(self, rng: np.random.Generator) -> ModelParams:
        return ModelParams.initialize(self.config, rng)

    def _weights(self, params: ParamsLike) -> Weights:
        if isinstance(params, ModelParams):
            if params.config != self.config:
                raise DimensionError("parameters were built for a different model config")
            return params.as_tensors(requires_grad=False)
        return params

    def _as_batch(self, x: Union[Tensor, np.ndarray, Sequence[float]]) -> Tuple[Tensor, bool]:
        x = Tensor.lift(x)
        if x.ndim == 1:
            if x.shape[0] != self.config.num_features:
                raise DimensionError(f"expected {self.config.num_features} features, got {x.shape[0]}")
            return x.reshape(1, x.shape[0]), True
        if x.ndim != 2 or x.shape[1] != self.config.num_features:
            raise DimensionError(f"expected a batch of shape (n, {self.config.num_features}), got {x.shape}")
        return x, False

    # -*- forward pieces

    def embed_features(self, x, params: ParamsLike) -> Tensor:
        """token_i = x_i · w_i + b_i；单样本返回 (d, E)，批量返回 (n, d, E)"""
        w = self._weights(params)
        batch, single = self._as_batch(x)
        n, d = batch.shape
        tokens = batch.reshape(n, d, 1) * w["embed.weight"] + w["embed.bias"]
        return tokens.reshape(d, self.config.embed_dim) if single else tokens

    def encoder_forward(self, tokens, params: ParamsLike) -> Tuple[Tensor, Tensor]:
        """
        编码器块前向计算

        Args:
            tokens: (d, E) 或 (n, d, E)
            params: 模型参数

        Returns:
            (新的 tokens，注意力张量)。注意力张量形状为 (heads, d, d) 或 (n, heads, d, d)，
            每行是 softmax 输出。
        """
        w = self._weights(params)
        tokens = Tensor.lift(tokens)
        d, e = self.config.num_features, self.config.embed_dim
        single = tokens.ndim == 2
        if tokens.shape[-2:] != (d, e) or tokens.ndim not in (2, 3):
            raise DimensionError(f"encoder expects tokens of shape (..., {d}, {e}), got {tokens.shape}")
        if single:
            tokens = tokens.reshape(1, d, e)
        n = tokens.shape[0]

        per_head = tokens.reshape(n, 1, d, e)
        query = per_head @ w["attn.query"]
        key = per_head @ w["attn.key"]
        value = per_head @ w["attn.value"]
        scores = (query @ key.swapaxes(-1, -2)) * self._scale
        attention = softmax(scores, axis=-1)
        mixed = ((attention @ value) @ w["attn.out"]).sum(axis=1) + w["attn.out_bias"]

        eps = self.config.layer_norm_eps
        hidden = layer_norm(tokens + mixed, w["norm1.gain"], w["norm1.bias"], eps)
        ff = gelu(hidden @ w["ff.weight1"] + w["ff.bias1"]) @ w["ff.weight2"] + w["ff.bias2"]
        out = layer_norm(hidden + ff, w["norm2.gain"], w["norm2.bias"], eps)

        if single:
            return out.reshape(d, e), attention.reshape(self.config.num_heads, d, d)
        return out, attention

    def forward(self, x, params: ParamsLike) -> ForwardOutput:
        w = self._weights(params)
        batch, _ = self._as_batch(x)
        tokens = self.embed_features(batch, w)
        encoded, attention = self.encoder_forward(tokens, w)
        pooled = encoded.mean(axis=1)
        hidden = gelu(pooled @ w["head.weight1"] + w["head.bias1"])
        logits = hidden @ w["head.weight2"] + w["head.bias2"]
        return ForwardOutput(log_probs=log_softmax(logits, axis=-1), attention=attention)

    def classify(self, x, params: ParamsLike) -> Tensor:
        """单样本对数概率，形状 (2,)"""
        x = Tensor.lift(x)
        if x.ndim != 1:
            raise DimensionError(f"classify takes one feature vector, got shape {x.shape}")
        return self.forward(x, params).log_probs.reshape(self.config.num_classes)

    # -*- gradient-free helpers

    def predict_log_proba(self, params: ParamsLike, features: np.ndarray, batch_size: int = 1024) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(1, -1)
        if features.shape[0] == 0:
            return np.zeros((0, self.config.num_classes))
        w = self._weights(params)
        outputs = [
            self.forward(features[start:start + batch_size], w).log_probs.value
            for start in range(0, features.shape[0], batch_size)
        ]
        return np.concatenate(outputs, axis=0)

    def predict(self, params: ParamsLike, features: np.ndarray) -> np.ndarray:
        log_probs = self.predict_log_proba(params, features)
        # ties go to class 0
        return (log_probs[:, 1] > log_probs[:, 0]).astype(np.int64)

    # -*- gradients

    def value_and_grad(self, params: ModelParams, features: np.ndarray, loss_fn: LossFn) -> Tuple[float, ParameterVector]:
        weights = params.as_tensors(requires_grad=True)
        out = self.forward(features, weights)
        loss = loss_fn(out.log_probs, weights)
        backward(loss)
        return loss.item(), gather_gradient(self.config, weights)

    def input_gradient(self, params: ParamsLike, features: np.ndarray, target: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        目标类别对数概率对输入的梯度（逐行独立）

        Returns:
            (每行目标类别的对数概率 (n,), 梯度 (n, d))
        """
        if not 0 <= target < self.config.num_classes:
            raise ContractError(f"target class {target} out of range")
        x = Tensor.leaf(np.atleast_2d(np.asarray(features, dtype=np.float64)), requires_grad=True)
        log_probs = self.forward(x, self._weights(params)).log_probs
        selector = np.zeros((1, self.config.num_classes))
        selector[0, target] = 1.0
        picked = (log_probs * selector).sum(axis=1)
        backward(picked.sum())
        return picked.value.copy(), x.grad.copy()

    # -*- attention

    def attention_maps(self, params: ParamsLike, features: np.ndarray, batch_size: int = 512) -> np.ndarray:
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        w = self._weights(params)
        maps = [
            self.forward(features[start:start + batch_size], w).attention.value
            for start in range(0, features.shape[0], batch_size)
        ]
        return np.concatenate(maps, axis=0)

    def average_attention(
        self,
        params: ParamsLike,
        samples: Sequence[Sequence[float]],
        normalize: bool = False,
    ) -> AttentionMatrix:
        samples = np.asarray(samples, dtype=np.float64)
        if samples.size == 0:
            raise ContractError("average_attention needs at least one sample")
        maps = self.attention_maps(params, samples)
        averaged = AttentionMatrix(
            scores=maps.mean(axis=(0, 1)),
            head_index=None,
            averaged=True,
            sample_count=int(maps.shape[0]),
        )
        return averaged.normalize() if normalize else averaged

    def head_attention(self, params: ParamsLike, x: Sequence[float]) -> List[AttentionMatrix]:
        maps = self.attention_maps(params, np.asarray(x, dtype=np.float64).reshape(1, -1))[0]
        return [AttentionMatrix(scores=maps[h], head_index=h) for h in range(maps.shape[0])]
