import json

import numpy as np
import pytest

from fedmatrix import ContractError, DimensionError
from fedmatrix.datasets_ import Dataset
from fedmatrix.explain import (
    AttributionReport,
    IGConfig,
    IntegratedGradients,
    class_attention_report,
    class_attribution_summary,
    completeness_gap,
    integrated_gradients,
    write_report,
)


NAMES = ("a", "b", "c")
WEIGHTS = np.array([0.5, -2.0, 1.25])


def _linear(batch: np.ndarray):
    batch = np.atleast_2d(batch)
    return batch @ WEIGHTS, np.tile(WEIGHTS, (batch.shape[0], 1))


def _quadratic(batch: np.ndarray):
    # F(x) = x_0^2 + 3 x_0 x_2; feature 1 never matters
    batch = np.atleast_2d(batch)
    values = batch[:, 0] ** 2 + 3.0 * batch[:, 0] * batch[:, 2]
    grads = np.stack([2.0 * batch[:, 0] + 3.0 * batch[:, 2], np.zeros(len(batch)), 3.0 * batch[:, 0]], axis=1)
    return values, grads


def test_linear_model_attributions_are_exact():
    x = np.array([1.0, 2.0, -3.0])
    report = IntegratedGradients(_linear, IGConfig(steps=16), NAMES).attribute(x)
    np.testing.assert_allclose(report.attributions, WEIGHTS * x, atol=1e-12)
    assert report.completeness_gap <= 1e-12
    assert completeness_gap(report) <= 1e-12


def test_custom_baseline():
    baseline = (1.0, 1.0, 1.0)
    x = np.array([2.0, 0.0, 4.0])
    report = IntegratedGradients(_linear, IGConfig(baseline=baseline), NAMES).attribute(x)
    np.testing.assert_allclose(report.attributions, WEIGHTS * (x - 1.0), atol=1e-12)
    assert report.baseline_kind == "custom"
    with pytest.raises(DimensionError):
        IntegratedGradients(_linear, IGConfig(baseline=(0.0, 0.0)), NAMES)


def test_input_equal_to_baseline_gives_zeros():
    report = IntegratedGradients(_quadratic, IGConfig(), NAMES).attribute(np.zeros(3))
    assert report.attributions == [0.0, 0.0, 0.0]


def test_irrelevant_feature_gets_zero():
    report = IntegratedGradients(_quadratic, IGConfig(steps=32), NAMES).attribute(np.array([1.5, 4.0, -0.5]))
    assert report.attributions[1] == 0.0


def test_completeness_gap_shrinks_with_steps():
    x = np.array([1.5, 4.0, 0.5])
    coarse = IntegratedGradients(_quadratic, IGConfig(steps=8), NAMES).attribute(x)
    fine = IntegratedGradients(_quadratic, IGConfig(steps=256), NAMES).attribute(x)
    assert fine.completeness_gap < coarse.completeness_gap
    assert fine.f_input == pytest.approx(1.5 ** 2 + 3.0 * 1.5 * 0.5)


def test_steps_must_be_positive():
    with pytest.raises(ContractError):
        IntegratedGradients(_linear, IGConfig(steps=0), NAMES)


def test_batching_does_not_change_results():
    x = np.array([1.5, 4.0, -0.5])
    whole = IntegratedGradients(_quadratic, IGConfig(steps=50), NAMES).attribute(x)
    pieces = IntegratedGradients(_quadratic, IGConfig(steps=50, batch_size=7), NAMES).attribute(x)
    np.testing.assert_allclose(whole.attributions, pieces.attributions, atol=1e-12)


def test_model_attributions_converge(tiny_model, tiny_params):
    x = np.random.default_rng(0).uniform(-0.5, 0.5, size=5)
    coarse = integrated_gradients(tiny_model, tiny_params, x, IGConfig(steps=64))
    fine = integrated_gradients(tiny_model, tiny_params, x, IGConfig(steps=20_000))
    np.testing.assert_allclose(coarse.attributions, fine.attributions, atol=1e-3)
    assert fine.completeness_gap <= 1e-3
    assert fine.f_input == pytest.approx(tiny_model.classify(x, tiny_params).value[1])


def test_completeness_on_the_model(tiny_model, tiny_params):
    rng = np.random.default_rng(1)
    violations = 0
    for _ in range(20):
        x = rng.normal(size=5)
        coarse = integrated_gradients(tiny_model, tiny_params, x, IGConfig(steps=8)).completeness_gap
        fine = integrated_gradients(tiny_model, tiny_params, x, IGConfig(steps=256)).completeness_gap
        violations += fine > coarse
    assert violations <= 1


def _class_dataset(labels):
    rng = np.random.default_rng(2)
    labels = np.asarray(labels)
    return Dataset(features=rng.normal(size=(labels.size, 5)), labels=labels, feature_names=tuple("vwxyz"))


def test_class_summary_with_cap_one(tiny_model, tiny_params):
    ds = _class_dataset([0, 1, 1, 0, 1, 1])
    config = IGConfig(steps=16, sample_cap=1)
    summary = class_attribution_summary(tiny_model, tiny_params, ds, 1, config, rng=np.random.default_rng(5))
    row = np.sort(np.random.default_rng(5).choice(np.flatnonzero(ds.labels == 1), size=1, replace=False))[0]
    single = integrated_gradients(tiny_model, tiny_params, ds.features[row], config, ds.feature_names)
    np.testing.assert_allclose(summary.attributions, single.attributions, atol=1e-12)
    assert summary.sample_count == 1
    assert summary.is_aggregate


def test_class_summary_averages_samples(tiny_model, tiny_params):
    ds = _class_dataset([0, 1, 0, 1])
    config = IGConfig(steps=16)
    summary = class_attribution_summary(tiny_model, tiny_params, ds, 1, config)
    first = integrated_gradients(tiny_model, tiny_params, ds.features[1], config, ds.feature_names)
    second = integrated_gradients(tiny_model, tiny_params, ds.features[3], config, ds.feature_names)
    np.testing.assert_allclose(
        summary.attributions, (np.array(first.attributions) + np.array(second.attributions)) / 2, atol=1e-12
    )
    assert summary.sample_count == 2
    assert summary.gap_max >= summary.gap_mean


def test_class_summary_needs_the_class(tiny_model, tiny_params):
    with pytest.raises(ContractError):
        class_attribution_summary(tiny_model, tiny_params, _class_dataset([0, 0, 0]), 1)


def test_report_document(tmp_path):
    report = IntegratedGradients(_linear, IGConfig(), NAMES).attribute(np.array([1.0, 1.0, 1.0]))
    assert [r.name for r in report.ranked()] == ["b", "c", "a"]
    path = write_report(report, tmp_path / "attribution.json")
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["metadata"]["target_kind"] == "log-probability"
    assert AttributionReport.from_document(document) == report


def test_attention_report(tiny_model, tiny_params):
    ds = _class_dataset([0, 1, 1, 1, 0])
    report = class_attention_report(tiny_model, tiny_params, ds, 1)
    raw = np.array(report.raw)
    normalized = np.array(report.normalized)
    assert raw.shape == normalized.shape == (5, 5)
    assert report.sample_count == 3
    assert normalized.min() == -1.0
    assert normalized.max() == 1.0
    with pytest.raises(ContractError):
        class_attention_report(tiny_model, tiny_params, _class_dataset([0, 0]), 1)
