from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelConfig(BaseModel):
    """Shape of the shared local/global tabular transformer."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_features: int = Field(21, ge=1, description="特征数 d，每个特征对应一个 token")
    embed_dim: int = Field(24, ge=1, description="token 嵌入维度")
    num_heads: int = Field(3, ge=1, description="多头自注意力的头数")
    ff_hidden: int = Field(48, ge=1, description="逐位置前馈网络的隐藏层宽度")
    head_hidden: int = Field(32, ge=1, description="分类头隐藏层宽度")
    num_classes: Literal[2] = Field(2, description="类别数，固定为 2（0 = 未违约，1 = 违约）")
    layer_norm_eps: float = Field(1e-5, gt=0, description="层归一化的 eps")

    @model_validator(mode="after")
    def _check_heads(self) -> "ModelConfig":
        if self.embed_dim % self.num_heads != 0:
            raise ValueError(
                f"embed_dim ({self.embed_dim}) must be divisible by num_heads ({self.num_heads})"
            )
        return self

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.num_heads
