from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .._errors import ContractError, DimensionError
from ..datasets_ import Dataset
from ..model_base import ModelParams, TabularTransformer
from ._config import IGConfig
from ._report import AttributionReport


# (n, d) inputs -> (target value per row (n,), input gradient (n, d))
GradientFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


def model_gradient_fn(model: TabularTransformer, params: ModelParams, target: int) -> GradientFn:
    return lambda batch: model.input_gradient(params, batch, target)


class IntegratedGradients:
    """
    右端点 Riemann 和近似的积分梯度

    ``IG_i = (x_i − x′_i) · (1/m) · Σ_{k=1..m} ∂F(x′ + (k/m)(x − x′)) / ∂x_i``，
    路径点成批送入 ``gradient_fn``。
    """

    def __init__(self, gradient_fn: GradientFn, config: IGConfig, feature_names: Sequence[str]):
        if config.steps < 1:
            raise ContractError(f"integrated gradients needs at least one step, got {config.steps}")
        self.gradient_fn = gradient_fn
        self.config = config
        self.feature_names = list(feature_names)
        self.baseline = config.baseline_vector(len(self.feature_names))

    @classmethod
    def for_model(
        cls,
        model: TabularTransformer,
        params: ModelParams,
        config: Optional[IGConfig] = None,
        feature_names: Optional[Sequence[str]] = None,
    ) -> "IntegratedGradients":
        config = config or IGConfig()
        names = feature_names or [f"feature_{i}" for i in range(model.config.num_features)]
        return cls(model_gradient_fn(model, params, config.target), config, names)

    def _evaluate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        values, grads = [], []
        for start in range(0, points.shape[0], self.config.batch_size):
            v, g = self.gradient_fn(points[start:start + self.config.batch_size])
            values.append(np.asarray(v, dtype=np.float64))
            grads.append(np.asarray(g, dtype=np.float64))
        return np.concatenate(values), np.concatenate(grads, axis=0)

    def attribute_batch(self, inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Returns:
            (attributions (n, d), F(x) (n,), F(x′) 标量)
        """
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        d = len(self.feature_names)
        if inputs.shape[1] != d:
            raise DimensionError(f"expected inputs with {d} features, got shape {inputs.shape}")
        m = self.config.steps
        n = inputs.shape[0]

        alphas = np.arange(1, m + 1, dtype=np.float64) / m
        delta = inputs - self.baseline
        # (n, m, d): path points of every sample, sample-major
        points = self.baseline + alphas[None, :, None] * delta[:, None, :]
        values, grads = self._evaluate(points.reshape(n * m, d))
        mean_grads = grads.reshape(n, m, d).mean(axis=1)

        # the k = m point is x itself
        f_input = values.reshape(n, m)[:, -1]
        f_baseline, _ = self.gradient_fn(self.baseline.reshape(1, d))
        return delta * mean_grads, f_input, float(np.asarray(f_baseline)[0])

    def attribute(self, x: Sequence[float]) -> AttributionReport:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise DimensionError(f"attribute takes one feature vector, got shape {x.shape}")
        attributions, f_input, f_baseline = self.attribute_batch(x.reshape(1, -1))
        gap = abs(float(attributions[0].sum()) - (float(f_input[0]) - f_baseline))
        return AttributionReport(
            feature_names=self.feature_names,
            attributions=attributions[0].tolist(),
            target_class=self.config.target,
            f_input=float(f_input[0]),
            f_baseline=f_baseline,
            completeness_gap=gap,
            steps=self.config.steps,
            baseline_kind=self.config.baseline_kind,
        )

    def summarize_class(self, dataset: Dataset, label: int, rng: np.random.Generator) -> AttributionReport:
        """对最多 ``sample_cap`` 个随机抽取的 ``label`` 类样本取平均归因"""
        rows = np.flatnonzero(dataset.labels == label)
        if rows.size == 0:
            raise ContractError(f"dataset has no samples of class {label}")
        if rows.size > self.config.sample_cap:
            rows = np.sort(rng.choice(rows, size=self.config.sample_cap, replace=False))

        attributions, f_input, f_baseline = self.attribute_batch(dataset.features[rows])
        gaps = np.abs(attributions.sum(axis=1) - (f_input - f_baseline))
        logger.debug(f"class {label}: attributed {rows.size} samples, mean completeness gap {gaps.mean():.3e}")
        return AttributionReport(
            feature_names=self.feature_names,
            attributions=attributions.mean(axis=0).tolist(),
            target_class=self.config.target,
            f_input=float(f_input.mean()),
            f_baseline=f_baseline,
            completeness_gap=abs(float(attributions.mean(axis=0).sum()) - (float(f_input.mean()) - f_baseline)),
            steps=self.config.steps,
            baseline_kind=self.config.baseline_kind,
            sample_count=int(rows.size),
            sample_class=int(label),
            gap_mean=float(gaps.mean()),
            gap_max=float(gaps.max()),
        )


def integrated_gradients(
    model: TabularTransformer,
    params: ModelParams,
    x: Sequence[float],
    config: Optional[IGConfig] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> AttributionReport:
    return IntegratedGradients.for_model(model, params, config, feature_names).attribute(x)


def completeness_gap(report: AttributionReport) -> float:
    """|Σ_i IG_i − (F(x) − F(x′))|"""
    return abs(float(np.sum(report.attributions)) - (report.f_input - report.f_baseline))


def class_attribution_summary(
    model: TabularTransformer,
    params: ModelParams,
    dataset: Dataset,
    label: int,
    config: Optional[IGConfig] = None,
    rng: Optional[np.random.Generator] = None,
) -> AttributionReport:
    explainer = IntegratedGradients.for_model(model, params, config, dataset.feature_names)
    return explainer.summarize_class(dataset, label, rng if rng is not None else np.random.default_rng(0))
