import math

import numpy as np
import pytest
from pydantic import ValidationError

from fedmatrix import ContractError, DimensionError, ParseError
from fedmatrix.datasets_ import (
    Dataset,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
    minority_count,
    stratified_split,
    write_csv,
)


def _toy(n_majority: int, n_minority: int, d: int = 3) -> Dataset:
    rng = np.random.default_rng(0)
    labels = rng.permutation(np.array([0] * n_majority + [1] * n_minority))
    return Dataset(
        features=rng.normal(size=(labels.size, d)),
        labels=labels,
        feature_names=tuple(f"f{i}" for i in range(d)),
    )


def test_dataset_rejects_bad_inputs():
    with pytest.raises(ContractError):
        Dataset(features=[[np.nan, 1.0]], labels=[0], feature_names=("a", "b"))
    with pytest.raises(ContractError):
        Dataset(features=[[0.0, 1.0]], labels=[2], feature_names=("a", "b"))
    with pytest.raises(DimensionError):
        Dataset(features=[[0.0, 1.0]], labels=[0, 1], feature_names=("a", "b"))
    with pytest.raises(DimensionError):
        Dataset(features=[[0.0, 1.0]], labels=[0], feature_names=("a",))


def test_minority_counts_for_default_clients():
    spec = SyntheticSpec()
    counts = [minority_count(rate, size) for rate, size in zip(spec.minority_rates, spec.sample_sizes)]
    assert counts == [135, 155, 165, 114]


def test_generated_clients_have_exact_class_counts():
    spec = SyntheticSpec()
    clients, test = generate_synthetic(spec)
    assert len(clients) == 4
    expected_test = 0
    for ds, size, rate in zip(clients, spec.sample_sizes, spec.minority_rates):
        n1 = minority_count(rate, size)
        n0 = size - n1
        k0, k1 = math.floor(0.8 * n0), math.floor(0.8 * n1)
        assert ds.class_counts() == {0: k0, 1: k1}
        expected_test += (n0 - k0) + (n1 - k1)
        assert ds.feature_names[0] == "credit_rating"
    assert len(test) == expected_test
    binary = np.concatenate([ds.features[:, -4:] for ds in clients])
    assert set(np.unique(binary)) <= {0.0, 1.0}


def test_generation_is_deterministic(tiny_spec):
    first_clients, first_test = generate_synthetic(tiny_spec)
    second_clients, second_test = generate_synthetic(tiny_spec)
    for a, b in zip(first_clients, second_clients):
        assert a.fingerprint() == b.fingerprint()
    assert first_test.fingerprint() == second_test.fingerprint()
    other, _ = generate_synthetic(tiny_spec.model_copy(update={"seed": 8}))
    assert other[0].fingerprint() != first_clients[0].fingerprint()


def _mean_gap(clients, num_continuous: int) -> float:
    means = [ds.features[ds.labels == 0, :num_continuous].mean(axis=0) for ds in clients]
    gaps = [np.abs(a - b).mean() for i, a in enumerate(means) for b in means[i + 1:]]
    return float(np.mean(gaps))


def test_zero_shift_is_iid():
    spec = SyntheticSpec(
        num_clients=3,
        sample_sizes=(3000, 3000, 3000),
        minority_rates=(0.1, 0.1, 0.1),
        shift_magnitude=0.0,
    )
    clients, _ = generate_synthetic(spec)
    assert _mean_gap(clients, 17) < 0.1


def test_shift_makes_clients_non_iid():
    spec = SyntheticSpec(shift_magnitude=2.0)
    clients, _ = generate_synthetic(spec)
    assert _mean_gap(clients, 17) > 0.5


def test_spec_validation():
    with pytest.raises(ValidationError):
        SyntheticSpec(minority_rates=(0.1, 0.1, 0.6, 0.1))
    with pytest.raises(ValidationError):
        SyntheticSpec(num_clients=3)
    with pytest.raises(ValidationError):
        SyntheticSpec(unknown=1)


def test_infeasible_class_counts():
    spec = SyntheticSpec(num_clients=1, sample_sizes=(10,), minority_rates=(0.1,), num_features=3, num_binary_features=0)
    with pytest.raises(ContractError):
        generate_synthetic(spec)


def test_stratified_split_counts():
    train, val = stratified_split(_toy(90, 10), 0.8)
    assert train.class_counts() == {0: 72, 1: 8}
    assert val.class_counts() == {0: 18, 1: 2}


def test_stratified_split_partitions_rows_in_order():
    ds = _toy(30, 7)
    train, val = stratified_split(ds, 0.5)
    rows = {tuple(r) for r in ds.features}
    assert {tuple(r) for r in train.features} | {tuple(r) for r in val.features} == rows
    assert len(train) + len(val) == len(ds)
    first_minority = ds.features[ds.labels == 1][0]
    np.testing.assert_array_equal(train.features[train.labels == 1][0], first_minority)


def test_stratified_split_keeps_one_sample_each_side():
    train, val = stratified_split(_toy(10, 2), 0.99)
    assert train.class_counts()[1] == 1
    assert val.class_counts()[1] == 1


def test_stratified_split_errors():
    with pytest.raises(ContractError):
        stratified_split(_toy(10, 1), 0.8)
    with pytest.raises(ContractError):
        stratified_split(_toy(10, 5), 1.0)


def test_csv_round_trip_is_exact(tmp_path, tiny_data):
    clients, _ = tiny_data
    path = write_csv(clients[0], tmp_path / "client_0.csv")
    loaded = load_csv(path)
    np.testing.assert_array_equal(loaded.features, clients[0].features)
    np.testing.assert_array_equal(loaded.labels, clients[0].labels)
    assert loaded.feature_names == clients[0].feature_names


def test_csv_bad_label(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,label\n1.0,2.0,0\n3.0,4.0,2\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        load_csv(path)
    assert info.value.row == 2
    assert info.value.column == "label"


def test_csv_non_numeric_cell(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,label\n1.0,oops,0\n", encoding="utf-8")
    with pytest.raises(ParseError) as info:
        load_csv(path)
    assert (info.value.row, info.value.column) == (1, "b")


def test_csv_schema_errors(tmp_path):
    path = tmp_path / "schema.csv"
    path.write_text("a,b,label\n1.0,2.0,0\n", encoding="utf-8")
    with pytest.raises(ParseError, match="missing feature column"):
        load_csv(path, feature_names=("a", "c"))
    with pytest.raises(ParseError, match="unexpected"):
        load_csv(path, feature_names=("a",))

    no_label = tmp_path / "no_label.csv"
    no_label.write_text("a,b\n1.0,2.0\n", encoding="utf-8")
    with pytest.raises(ParseError, match="label"):
        load_csv(no_label)

    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ParseError, match="empty"):
        load_csv(empty)
