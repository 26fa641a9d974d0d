import json
from typing import Any, Dict, Optional

from loguru import logger
from prefect import task

from ...datasets_ import datasets_fingerprint
from ...experiment import ExperimentConfig, RunManifest
from ...federation import SelectorProvider, write_round_log
from ...model_base import save_checkpoint
from ._common import TrainingSummary, build_federation, load_federated_data


ROUND_LOG = "round_log.csv"
BEST_CHECKPOINT = "best_checkpoint.npz"
SUMMARY = "summary.json"


@task(name="train")
def train(
    config: ExperimentConfig,
    *,
    selector_provider: Optional[SelectorProvider] = None,
) -> Dict[str, Any]:
    """完整的联邦训练：写出轮次日志、最优模型检查点与摘要"""
    run_dir = config.run_dir
    clients, test = load_federated_data(config)
    dataset_hash = datasets_fingerprint([*clients, test])
    federation = build_federation(config, clients, test, selector_provider=selector_provider)
    logger.info(
        f"* training {federation.config.strategy_label} with {federation.loss_config.kind.value} "
        f"for {federation.config.rounds} round(s), aggregation={federation.config.aggregation_mode.value}"
    )

    result = federation.run_training()
    write_round_log(result.records, run_dir / ROUND_LOG)
    save_checkpoint(run_dir / BEST_CHECKPOINT, result.best)
    summary = TrainingSummary.from_result(result, federation.config, federation.loss_config, dataset_hash)
    (run_dir / SUMMARY).write_text(json.dumps(summary.model_dump(), indent=2), encoding="utf-8")

    RunManifest.for_run(
        "train",
        config,
        dataset_hash=dataset_hash,
        files=[ROUND_LOG, BEST_CHECKPOINT, SUMMARY],
    ).write(run_dir)
    return summary.model_dump()
