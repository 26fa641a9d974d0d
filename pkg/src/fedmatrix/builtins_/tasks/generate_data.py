from typing import Any, Dict

from loguru import logger
from prefect import task

from ...datasets_ import datasets_fingerprint, generate_synthetic, write_csv
from ...experiment import ExperimentConfig, RunManifest


@task(name="generate_data")
def generate_data(config: ExperimentConfig) -> Dict[str, Any]:
    """按合成数据设置生成每个客户端的 CSV 与全局测试集 CSV"""
    spec = config.to_synthetic_spec()
    run_dir = config.run_dir
    logger.info(f"* generating {spec.num_clients} synthetic clients into {run_dir}")

    clients, test = generate_synthetic(spec)
    rows: Dict[str, int] = {}
    for client_id, ds in enumerate(clients):
        path = write_csv(ds, run_dir / f"client_{client_id}.csv")
        rows[path.name] = len(ds)
    rows[write_csv(test, run_dir / "test.csv").name] = len(test)

    manifest = RunManifest.for_run(
        "generate-data",
        config,
        dataset_hash=datasets_fingerprint([*clients, test]),
        files=sorted(rows),
        details={"spec": spec.model_dump(mode="json"), "rows": rows},
    )
    manifest_path = manifest.write(run_dir)
    return {"files": [str(run_dir / name) for name in sorted(rows)], "manifest": str(manifest_path), "rows": rows}
