from pathlib import Path
from typing import Any, Dict

from loguru import logger
from prefect import task

from ..._errors import DimensionError
from ...experiment import ExperimentConfig, RunManifest
from ...explain import class_attention_report, class_attribution_summary, write_report
from ...model_base import TabularTransformer, load_checkpoint
from ...utils import substream
from ._common import load_client_dataset
from .train import BEST_CHECKPOINT


@task(name="explain")
def explain(config: ExperimentConfig) -> Dict[str, Any]:
    """
    用检查点模型与单个客户端的本地数据生成两类样本的归因报告与平均注意力矩阵
    """
    run_dir = config.run_dir
    checkpoint_path = Path(config.checkpoint) if config.checkpoint else run_dir / BEST_CHECKPOINT
    checkpoint = load_checkpoint(checkpoint_path)
    model = TabularTransformer(checkpoint.params.config)

    local = load_client_dataset(config, config.explain_client)
    if local.num_features != model.config.num_features:
        raise DimensionError(
            f"client data has {local.num_features} features, checkpoint expects {model.config.num_features}"
        )
    logger.info(f"* explaining checkpoint round {checkpoint.round} on client {config.explain_client} ({len(local)} rows)")

    ig_config = config.to_ig_config()
    files = []
    for label in (0, 1):
        attribution = class_attribution_summary(
            model, checkpoint.params, local, label, ig_config, rng=substream(config.seed, "explain", "ig", label),
        )
        files.append(write_report(attribution, run_dir / f"attribution_class{label}.json").name)
        attention = class_attention_report(
            model,
            checkpoint.params,
            local,
            label,
            sample_cap=ig_config.sample_cap,
            rng=substream(config.seed, "explain", "attention", label),
        )
        files.append(write_report(attention, run_dir / f"attention_class{label}.json").name)

    RunManifest.for_run(
        "explain",
        config,
        dataset_hash=local.fingerprint(),
        files=files,
        details={"checkpoint": str(checkpoint_path), "checkpoint_round": checkpoint.round},
    ).write(run_dir)
    return {"files": [str(run_dir / name) for name in files]}
