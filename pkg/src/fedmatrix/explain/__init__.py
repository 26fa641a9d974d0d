from ._config import IGConfig
from ._report import AttentionReport, AttributionReport, FeatureAttribution, write_report
from ._integrated_gradients import (
    GradientFn,
    IntegratedGradients,
    class_attribution_summary,
    completeness_gap,
    integrated_gradients,
    model_gradient_fn,
)
from ._attention import class_attention_report


__all__ = [
    "IGConfig",
    "AttentionReport",
    "AttributionReport",
    "FeatureAttribution",
    "write_report",
    "GradientFn",
    "IntegratedGradients",
    "class_attribution_summary",
    "completeness_gap",
    "integrated_gradients",
    "model_gradient_fn",
    "class_attention_report",
]
