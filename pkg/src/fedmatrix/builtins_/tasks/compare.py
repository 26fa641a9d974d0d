from typing import List, Optional

import pandas as pd
from loguru import logger
from prefect import task

from ...datasets_ import datasets_fingerprint
from ...experiment import ExperimentConfig, RunManifest
from ...federation import FederationStrategy, SelectorProvider, write_round_log
from ...losses import LossKind
from ._common import TrainingSummary, build_federation, load_federated_data


COMPARISON = "comparison.csv"
COMPARISON_COLUMNS = (
    "model", "loss", "recall", "precision", "f1", "communication_round", "strategy", "dataset_hash",
)


@task(name="compare")
def compare(
    config: ExperimentConfig,
    *,
    selector_provider: Optional[SelectorProvider] = None,
) -> pd.DataFrame:
    """
    三种联邦方案 × 三种损失函数的对比表

    九个组合使用同一份客户端数据与同一个根种子。
    """
    run_dir = config.run_dir
    clients, test = load_federated_data(config)
    base_federation = config.to_federation_config()
    base_loss = config.to_loss_config()

    rows: List[dict] = []
    files = [COMPARISON]
    for strategy in FederationStrategy:
        for loss in LossKind:
            federation = build_federation(
                config,
                clients,
                test,
                federation_config=strategy.apply(base_federation),
                loss_config=base_loss.model_copy(update={"kind": loss}),
                selector_provider=selector_provider,
            )
            dataset_hash = datasets_fingerprint([*federation.datasets, federation.test])
            logger.info(f"* compare cell {strategy.value} × {loss.value}")
            result = federation.run_training()

            log_name = f"round_log_{strategy.value}_{loss.value}.csv"
            write_round_log(result.records, run_dir / log_name)
            files.append(log_name)

            summary = TrainingSummary.from_result(result, federation.config, federation.loss_config, dataset_hash)
            rows.append({
                "model": strategy.value,
                "loss": loss.value,
                "recall": summary.best_recall,
                "precision": summary.best_precision,
                "f1": summary.best_f1,
                "communication_round": summary.best_round,
                "strategy": summary.strategy,
                "dataset_hash": dataset_hash,
            })

    table = pd.DataFrame(rows, columns=list(COMPARISON_COLUMNS))
    run_dir.mkdir(parents=True, exist_ok=True)
    table.to_csv(run_dir / COMPARISON, index=False, float_format="%.17g", lineterminator="\n")
    RunManifest.for_run(
        "compare",
        config,
        dataset_hash=rows[0]["dataset_hash"],
        files=files,
    ).write(run_dir)
    return table
