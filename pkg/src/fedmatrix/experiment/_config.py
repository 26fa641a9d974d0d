import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .._errors import ConfigError
from ..datasets_ import SyntheticSpec
from ..explain import IGConfig
from ..federation import AggregationMode, FederationConfig, MuMode, SelectionStrategy
from ..losses import LossConfig, LossKind
from ..model_base import ModelConfig
from ..secure_agg import SchemeParams


class ExperimentConfig(BaseModel):
    """
    一次实验的全部配置（扁平键，对应单个 YAML 映射）

    各子配置通过 ``to_*`` 方法投影得到；构造时即完成全部校验，未知键直接拒绝。
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    # -*- run
    out_dir: str = Field("runs", description="输出根目录")
    run_name: str = Field("default", min_length=1, description="本次运行的子目录名")
    seed: int = Field(0, ge=0, description="根种子：数据生成、模型初始化、本地训练、选择与加密均由其派生")
    log_level: Literal["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"] = Field(
        "INFO", description="日志级别"
    )
    log_file: Optional[str] = Field(None, description="额外的日志文件名，写在运行目录下")

    # -*- data
    client_csvs: Optional[List[str]] = Field(None, description="每个客户端的 CSV 路径；为空时使用合成数据")
    test_csv: Optional[str] = Field(None, description="全局测试集 CSV 路径，与 client_csvs 一起使用")
    sample_sizes: Tuple[int, ...] = Field((1148, 1244, 1176, 840), description="合成数据：每个客户端的样本数")
    minority_rates: Tuple[float, ...] = Field(
        (0.1175, 0.1245, 0.1404, 0.1352), description="合成数据：每个客户端的违约比例"
    )
    shift_magnitude: float = Field(1.0, description="合成数据：客户端均值偏移幅度")
    class_separation: float = Field(2.0, description="合成数据：两类均值距离")
    num_binary_features: int = Field(4, description="合成数据：二值特征个数")
    test_fraction: float = Field(0.2, description="合成数据：划入全局测试集的比例")

    # -*- model
    num_features: int = Field(21, description="特征数 d")
    embed_dim: int = Field(24)
    num_heads: int = Field(3)
    ff_hidden: int = Field(48)
    head_hidden: int = Field(32)
    layer_norm_eps: float = Field(1e-5)

    # -*- loss
    loss: LossKind = Field(LossKind.WEIGHTED_NLL, description="weighted-nll | cross-entropy | focal")
    class_weights: Tuple[float, float] = Field((0.25, 0.75))
    focal_gamma: float = Field(2.0)

    # -*- federation
    num_clients: int = Field(4)
    selection_ratio: float = Field(0.5)
    rounds: int = Field(50)
    local_epochs: int = Field(5)
    batch_size: int = Field(64)
    lr: float = Field(0.01)
    mu_step: float = Field(0.0002)
    mu_cap: float = Field(0.01)
    mu_mode: MuMode = Field(MuMode.VARYING)
    selection_strategy: SelectionStrategy = Field(SelectionStrategy.PBCS)
    aggregation_mode: AggregationMode = Field(AggregationMode.ENCRYPTED)
    train_fraction: float = Field(0.8)
    num_workers: int = Field(1)
    record_durations: Optional[bool] = Field(None)

    # -*- encryption
    ring_degree: int = Field(1024)
    modulus: int = Field(2**59 - 55)
    delta: int = Field(2**25)
    error_std: float = Field(3.2)
    max_value: float = Field(100.0)

    # -*- explanation
    checkpoint: Optional[str] = Field(None, description="explain 使用的检查点；为空时取本次运行目录下的 best_checkpoint.npz")
    explain_client: int = Field(0, ge=0, description="explain 使用哪个客户端的本地数据")
    ig_steps: int = Field(64)
    ig_baseline: Optional[Tuple[float, ...]] = Field(None)
    ig_target: int = Field(1)
    ig_batch_size: int = Field(4096)
    ig_sample_cap: int = Field(2000)

    @model_validator(mode="after")
    def _check_projections(self) -> "ExperimentConfig":
        try:
            self.to_architecture()
            self.to_loss_config()
            self.to_federation_config()
            self.to_scheme_params()
            self.to_ig_config()
            if self.client_csvs is None:
                self.to_synthetic_spec()
        except ValidationError as exc:
            raise ValueError(str(exc)) from None
        if (self.client_csvs is None) != (self.test_csv is None):
            raise ValueError("client_csvs and test_csv must be given together")
        if self.client_csvs is not None and len(self.client_csvs) != self.num_clients:
            raise ValueError(f"{len(self.client_csvs)} client CSVs for num_clients={self.num_clients}")
        if self.explain_client >= self.num_clients:
            raise ValueError(f"explain_client {self.explain_client} out of range for {self.num_clients} clients")
        return self

    # -*- projections

    def to_architecture(self) -> ModelConfig:
        return ModelConfig(
            num_features=self.num_features,
            embed_dim=self.embed_dim,
            num_heads=self.num_heads,
            ff_hidden=self.ff_hidden,
            head_hidden=self.head_hidden,
            layer_norm_eps=self.layer_norm_eps,
        )

    def to_loss_config(self) -> LossConfig:
        return LossConfig(kind=self.loss, class_weights=self.class_weights, focal_gamma=self.focal_gamma)

    def to_federation_config(self) -> FederationConfig:
        return FederationConfig(
            num_clients=self.num_clients,
            selection_ratio=self.selection_ratio,
            rounds=self.rounds,
            local_epochs=self.local_epochs,
            batch_size=self.batch_size,
            lr=self.lr,
            mu_step=self.mu_step,
            mu_cap=self.mu_cap,
            mu_mode=self.mu_mode,
            selection_strategy=self.selection_strategy,
            aggregation_mode=self.aggregation_mode,
            train_fraction=self.train_fraction,
            seed=self.seed,
            num_workers=self.num_workers,
            record_durations=self.record_durations,
        )

    def to_synthetic_spec(self) -> SyntheticSpec:
        return SyntheticSpec(
            num_clients=self.num_clients,
            sample_sizes=self.sample_sizes,
            minority_rates=self.minority_rates,
            num_features=self.num_features,
            shift_magnitude=self.shift_magnitude,
            class_separation=self.class_separation,
            num_binary_features=self.num_binary_features,
            test_fraction=self.test_fraction,
            seed=self.seed,
        )

    def to_scheme_params(self) -> SchemeParams:
        return SchemeParams(
            ring_degree=self.ring_degree,
            modulus=self.modulus,
            delta=self.delta,
            error_std=self.error_std,
            max_value=self.max_value,
        )

    def to_ig_config(self) -> IGConfig:
        return IGConfig(
            baseline=self.ig_baseline,
            steps=self.ig_steps,
            target=self.ig_target,
            batch_size=self.ig_batch_size,
            sample_cap=self.ig_sample_cap,
        )

    # -*- paths and identity

    @property
    def run_dir(self) -> Path:
        return Path(self.out_dir) / self.run_name

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def parse_override(item: str) -> Tuple[str, Any]:
    """``key=value``，value 按 YAML 标量/列表解析"""
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    try:
        return key, yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse value of override {key!r}: {exc}") from None


def _describe(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(p) for p in error["loc"]) or "config"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig(**dict(values))
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {_describe(exc)}") from None


_MANIFEST_KEYS = frozenset({"command", "config", "config_hash"})


def _read_mapping(path: Path) -> Dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        # json keeps float spellings such as 1e-05 that YAML 1.1 reads as strings
        loaded = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"config file {path} cannot be parsed: {exc}") from None
    if loaded is None:
        loaded = {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"config file {path} must contain a mapping, got {type(loaded).__name__}")
    return loaded


def _manifest_values(manifest: Dict[str, Any], path: Union[str, Path]) -> Dict[str, Any]:
    recorded = manifest["config"]
    if not isinstance(recorded, dict):
        raise ConfigError(f"manifest {path} has no config mapping")
    if build_config(recorded).config_hash() != manifest["config_hash"]:
        raise ConfigError(f"manifest {path} config does not match its config_hash")
    return dict(recorded)


def load_experiment_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Union[Mapping[str, Any], Sequence[str], None] = None,
) -> ExperimentConfig:
    """
    读取 YAML 配置（或一次运行写出的 manifest.json）并应用覆盖项（覆盖项先于校验生效）

    传入 manifest 时使用其中记录的完整配置，从而重放那次运行。

    Raises:
        ConfigError: 文件无法读取或不是映射、存在未知键、取值不合法、manifest 与其配置哈希不符
    """
    values: Dict[str, Any] = {}
    if path is not None:
        loaded = _read_mapping(Path(path))
        if _MANIFEST_KEYS <= loaded.keys():
            loaded = _manifest_values(loaded, path)
        values.update(loaded)

    if overrides:
        if isinstance(overrides, Mapping):
            values.update(overrides)
        else:
            values.update(parse_override(item) for item in overrides)
    return build_config(values)
