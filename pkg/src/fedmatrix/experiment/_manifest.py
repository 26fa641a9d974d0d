import json
import platform
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..__about__ import __version__
from ._config import ExperimentConfig


_TRACKED_PACKAGES = ("numpy", "pandas", "pydantic", "prefect", "loguru", "pyyaml", "scikit-learn")

MANIFEST_NAME = "manifest.json"


def package_versions() -> Dict[str, str]:
    versions = {"fedmatrix": __version__, "python": platform.python_version()}
    for name in _TRACKED_PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class RunManifest(BaseModel):
    """每次运行写出的清单：足以复现本次运行"""
    command: str
    config: Dict[str, Any]
    config_hash: str
    seed: int
    versions: Dict[str, str] = Field(default_factory=package_versions)
    dataset_hash: Optional[str] = None
    files: List[str] = Field(default_factory=list, description="相对运行目录的输出文件")
    details: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def for_run(cls, command: str, config: ExperimentConfig, **kwargs) -> "RunManifest":
        return cls(
            command=command,
            config=config.model_dump(mode="json"),
            config_hash=config.config_hash(),
            seed=config.seed,
            **kwargs,
        )

    def write(self, run_dir: Path) -> Path:
        path = Path(run_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.model_dump(mode="json"), indent=2, ensure_ascii=False), encoding="utf-8")
        return path


def read_manifest(path: Path) -> RunManifest:
    return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
