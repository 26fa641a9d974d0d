import pytest

from fedmatrix import ConfigError
from fedmatrix.experiment import ExperimentConfig, RunManifest, load_experiment_config, parse_override, read_manifest
from fedmatrix.federation import AggregationMode, MuMode
from fedmatrix.losses import LossKind


def test_defaults_project_to_valid_sub_configs():
    config = ExperimentConfig()
    assert config.to_architecture().num_features == 21
    assert config.to_federation_config().num_selected == 2
    assert config.to_federation_config().mu_mode == MuMode.VARYING
    assert config.to_scheme_params().delta == 2**25
    assert config.to_synthetic_spec().sample_sizes == (1148, 1244, 1176, 840)
    assert config.to_ig_config().steps == 64


def test_parse_override():
    assert parse_override("rounds=3") == ("rounds", 3)
    assert parse_override("loss=focal") == ("loss", "focal")
    assert parse_override("sample_sizes=[10, 20]") == ("sample_sizes", [10, 20])
    with pytest.raises(ConfigError):
        parse_override("rounds")


def test_load_from_yaml_with_overrides(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("rounds: 7\nloss: focal\naggregation_mode: plaintext\n", encoding="utf-8")
    config = load_experiment_config(path, ["rounds=3", "seed=11"])
    assert config.rounds == 3
    assert config.seed == 11
    assert config.loss == LossKind.FOCAL
    assert config.aggregation_mode == AggregationMode.PLAINTEXT


def test_unknown_keys_are_rejected(tmp_path):
    with pytest.raises(ConfigError, match="roundz"):
        load_experiment_config(overrides={"roundz": 3})
    path = tmp_path / "config.yaml"
    path.write_text("- just\n- a list\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_experiment_config(path)
    with pytest.raises(ConfigError):
        load_experiment_config(tmp_path / "missing.yaml")


def test_invalid_values_are_config_errors():
    with pytest.raises(ConfigError):
        load_experiment_config(overrides={"embed_dim": 25})
    with pytest.raises(ConfigError):
        load_experiment_config(overrides={"selection_ratio": 0.0})
    with pytest.raises(ConfigError):
        load_experiment_config(overrides={"delta": 2**30})
    with pytest.raises(ConfigError):
        load_experiment_config(overrides={"client_csvs": ["a.csv"] * 4})
    with pytest.raises(ConfigError):
        load_experiment_config(overrides={"explain_client": 4})


def test_config_hash_is_stable():
    first = ExperimentConfig(rounds=3)
    assert first.config_hash() == ExperimentConfig(rounds=3).config_hash()
    assert first.config_hash() != ExperimentConfig(rounds=4).config_hash()


def test_manifest_round_trip(tmp_path):
    config = ExperimentConfig(seed=4)
    path = RunManifest.for_run("train", config, dataset_hash="abc", files=["x.csv"]).write(tmp_path)
    manifest = read_manifest(path)
    assert manifest.config_hash == config.config_hash()
    assert manifest.seed == 4
    assert manifest.files == ["x.csv"]
    assert {"fedmatrix", "python", "numpy"} <= set(manifest.versions)


def test_manifest_replays_its_config(tmp_path):
    config = ExperimentConfig(seed=4, rounds=2, layer_norm_eps=1e-5, aggregation_mode="plaintext")
    path = RunManifest.for_run("train", config).write(tmp_path)
    assert load_experiment_config(path) == config
    replay = load_experiment_config(path, ["run_name=replay"])
    assert replay.run_name == "replay"
    assert replay.model_copy(update={"run_name": config.run_name}) == config


def test_tampered_manifest_is_rejected(tmp_path):
    manifest = RunManifest.for_run("train", ExperimentConfig(seed=4))
    manifest.config["seed"] = 5
    path = manifest.write(tmp_path)
    with pytest.raises(ConfigError, match="config_hash"):
        load_experiment_config(path)


def test_durations_default_follows_aggregation_mode():
    assert ExperimentConfig().to_federation_config().durations_recorded
    assert not ExperimentConfig(aggregation_mode="plaintext").to_federation_config().durations_recorded
    forced = ExperimentConfig(aggregation_mode="plaintext", record_durations=True)
    assert forced.to_federation_config().durations_recorded
