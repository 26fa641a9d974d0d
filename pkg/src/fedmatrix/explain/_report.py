import json
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field


class FeatureAttribution(BaseModel):
    name: str
    attribution: float


class AttributionReport(BaseModel):
    """
    积分梯度归因报告

    单样本报告中 ``f_input`` / ``f_baseline`` 为该样本的目标对数概率；
    汇总报告中为所选样本的平均值，``gap_mean`` / ``gap_max`` 为逐样本完备性误差的统计。
    """
    feature_names: List[str]
    attributions: List[float]
    target_class: int = Field(..., description="被归因的类别")
    target_kind: str = Field("log-probability", description="被归因的模型输出")
    f_input: float = Field(..., description="F(x)")
    f_baseline: float = Field(..., description="F(x′)")
    completeness_gap: float = Field(..., description="|Σ IG − (F(x) − F(x′))|")
    steps: int
    baseline_kind: str
    sample_count: int = 1
    sample_class: Optional[int] = Field(None, description="汇总报告所选样本的真实类别")
    gap_mean: Optional[float] = None
    gap_max: Optional[float] = None

    @property
    def is_aggregate(self) -> bool:
        return self.sample_class is not None

    def records(self) -> List[FeatureAttribution]:
        return [FeatureAttribution(name=n, attribution=a) for n, a in zip(self.feature_names, self.attributions)]

    def ranked(self) -> List[FeatureAttribution]:
        return sorted(self.records(), key=lambda r: -abs(r.attribution))

    def to_document(self) -> Dict[str, object]:
        metadata = self.model_dump(exclude={"feature_names", "attributions"})
        return {"metadata": metadata, "features": [r.model_dump() for r in self.records()]}

    @classmethod
    def from_document(cls, document: Dict[str, object]) -> "AttributionReport":
        features = document["features"]
        return cls(
            feature_names=[f["name"] for f in features],
            attributions=[f["attribution"] for f in features],
            **document["metadata"],
        )


class AttentionReport(BaseModel):
    """按类别平均的 d × d 注意力矩阵，原始分数与归一化分数一并输出"""
    feature_names: List[str]
    sample_class: int
    sample_count: int
    raw: List[List[float]]
    normalized: List[List[float]]
    normalization: str = Field("min-max to [-1, 1] over the averaged matrix")


def write_report(report: Union[AttributionReport, AttentionReport], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = report.to_document() if isinstance(report, AttributionReport) else report.model_dump()
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False), encoding="utf-8")
    return path
