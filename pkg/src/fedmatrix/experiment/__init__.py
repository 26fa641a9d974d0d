from ._config import (
    ExperimentConfig,
    build_config,
    load_experiment_config,
    parse_override,
)
from ._manifest import MANIFEST_NAME, RunManifest, package_versions, read_manifest


__all__ = [
    "ExperimentConfig",
    "build_config",
    "load_experiment_config",
    "parse_override",
    "MANIFEST_NAME",
    "RunManifest",
    "package_versions",
    "read_manifest",
]
