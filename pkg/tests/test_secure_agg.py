from dataclasses import replace

import numpy as np
import pytest

from fedmatrix import ContractError, DimensionError, ParameterError, ParseError, RangeError
from fedmatrix.secure_agg import (
    Ciphertext,
    SchemeParams,
    SecureAggregator,
    add,
    center,
    decrypt,
    encrypt,
    is_probable_prime,
    keygen,
    negacyclic_multiply,
    scale_by_plain,
)


def _schoolbook(x, y, q):
    n = len(x)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            k = i + j
            term = int(x[i]) * int(y[j])
            if k < n:
                out[k] += term
            else:
                out[k - n] -= term
    return np.array([v % q for v in out], dtype=np.int64)


@pytest.fixture(scope="module")
def params() -> SchemeParams:
    return SchemeParams()


@pytest.fixture(scope="module")
def keys(params):
    return keygen(params, np.random.default_rng(0))


def test_default_modulus_is_prime(params):
    assert is_probable_prime(params.modulus)
    assert is_probable_prime(2**61 - 1)
    assert not is_probable_prime(2**61 + 1)
    assert params.error_bound == 19


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        SchemeParams.checked(ring_degree=1000)
    with pytest.raises(ParameterError):
        SchemeParams.checked(modulus=2**59 - 1)
    with pytest.raises(ParameterError):
        SchemeParams.checked(delta=2**30)


@pytest.mark.parametrize("n", [8, 64])
def test_negacyclic_multiply_matches_schoolbook(params, n):
    rng = np.random.default_rng(n)
    q = params.modulus
    x = rng.integers(0, q, size=n, dtype=np.int64)
    y = rng.integers(0, q, size=n, dtype=np.int64)
    np.testing.assert_array_equal(negacyclic_multiply(x, y, q), _schoolbook(x, y, q))


def test_negacyclic_wraps_with_sign(params):
    q = params.modulus
    x = np.array([0, 0, 0, 1], dtype=np.int64)
    np.testing.assert_array_equal(negacyclic_multiply(x, x, q), [0, 0, q - 1, 0])
    with pytest.raises(DimensionError):
        negacyclic_multiply(np.ones(4, dtype=np.int64), np.ones(8, dtype=np.int64), q)


def test_keygen_relation(params, keys):
    residual = center(keys.public.b + negacyclic_multiply(keys.public.a, keys.secret.s, params.modulus), params.modulus)
    assert np.max(np.abs(residual)) <= params.error_bound
    assert set(np.unique(keys.secret.s)) <= {-1, 0, 1}
    other = keygen(params, np.random.default_rng(1))
    assert not np.array_equal(other.secret.s, keys.secret.s)


def test_encrypt_decrypt_round_trip(keys):
    rng = np.random.default_rng(2)
    values = rng.uniform(-100.0, 100.0, size=700)
    ct = encrypt(keys.public, values, rng)
    assert np.max(np.abs(decrypt(keys.secret, ct) - values)) <= 1e-4
    np.testing.assert_allclose(decrypt(keys.secret, encrypt(keys.public, np.zeros(5), rng)), 0.0, atol=1e-4)


def test_long_vectors_are_chunked(keys):
    rng = np.random.default_rng(3)
    values = rng.normal(size=2500)
    ct = encrypt(keys.public, values, rng)
    assert ct.num_chunks == 3
    assert ct.length == 2500
    assert np.max(np.abs(decrypt(keys.secret, ct) - values)) <= 1e-4


def test_encryption_is_randomized(keys):
    values = np.array([0.5, -1.25, 3.0])
    first = encrypt(keys.public, values, np.random.default_rng(4))
    second = encrypt(keys.public, values, np.random.default_rng(5))
    assert not np.array_equal(first.c0, second.c0)


def test_range_and_shape_errors(keys):
    rng = np.random.default_rng(6)
    with pytest.raises(RangeError):
        encrypt(keys.public, np.array([101.0]), rng)
    with pytest.raises(RangeError):
        encrypt(keys.public, np.array([np.nan]), rng)
    with pytest.raises(DimensionError):
        encrypt(keys.public, np.ones((2, 2)), rng)
    with pytest.raises(ContractError):
        encrypt(keys.public, np.array([]), rng)


def test_homomorphic_addition(keys):
    rng = np.random.default_rng(7)
    x = rng.uniform(-50, 50, size=300)
    y = rng.uniform(-50, 50, size=300)
    total = add(encrypt(keys.public, x, rng), encrypt(keys.public, y, rng))
    assert np.max(np.abs(decrypt(keys.secret, total) - (x + y))) <= 2e-4
    zero = encrypt(keys.public, np.zeros(300), rng)
    assert np.max(np.abs(decrypt(keys.secret, add(encrypt(keys.public, x, rng), zero)) - x)) <= 2e-4


def test_scale_by_plain_examples(keys):
    rng = np.random.default_rng(8)
    ct = encrypt(keys.public, np.array([0.5, -1.25]), rng)
    np.testing.assert_allclose(decrypt(keys.secret, scale_by_plain(ct, 0.4)), [0.2, -0.5], atol=1e-4)
    np.testing.assert_allclose(decrypt(keys.secret, scale_by_plain(ct, 0.0)), [0.0, 0.0], atol=1e-6)
    np.testing.assert_allclose(decrypt(keys.secret, scale_by_plain(ct, 1.0)), [0.5, -1.25], atol=1e-3)


def test_scale_by_plain_contract(keys):
    ct = encrypt(keys.public, np.array([1.0, 2.0]), np.random.default_rng(9))
    with pytest.raises(ContractError):
        scale_by_plain(ct, 1.5)
    with pytest.raises(ContractError):
        scale_by_plain(scale_by_plain(ct, 0.5), 0.5)


def test_add_requires_matching_scale_and_layout(keys):
    rng = np.random.default_rng(10)
    fresh = encrypt(keys.public, np.ones(4), rng)
    with pytest.raises(ContractError):
        add(fresh, scale_by_plain(encrypt(keys.public, np.ones(4), rng), 0.5))
    with pytest.raises(ContractError):
        add(fresh, encrypt(keys.public, np.ones(5), rng))


def test_wrong_key_does_not_decrypt(params, keys):
    values = np.array([1.0, -2.0, 3.0])
    ct = encrypt(keys.public, values, np.random.default_rng(11))
    stranger = keygen(params, np.random.default_rng(12))
    assert np.max(np.abs(decrypt(stranger.secret, ct) - values)) > 1.0


def test_zero_scale_is_rejected(keys):
    ct = encrypt(keys.public, np.ones(3), np.random.default_rng(13))
    with pytest.raises(ContractError):
        decrypt(keys.secret, replace(ct, scale=0))


def test_weighted_average_pipeline():
    aggregator = SecureAggregator(seed=1)
    rng = np.random.default_rng(14)
    w1 = rng.normal(size=1000)
    w2 = rng.normal(size=1000)
    result = aggregator.weighted_average([w1, w2], [0.6, 0.4], client_ids=[0, 3], round_index=1)
    assert np.max(np.abs(result - (0.6 * w1 + 0.4 * w2))) <= 1e-3


@pytest.mark.parametrize("trial", range(5))
def test_multi_client_aggregation_error(trial):
    rng = np.random.default_rng(100 + trial)
    num_clients = int(rng.integers(2, 9))
    vectors = [rng.uniform(-1.0, 1.0, size=1500) for _ in range(num_clients)]
    sizes = rng.integers(50, 500, size=num_clients)
    gammas = sizes / sizes.sum()
    aggregator = SecureAggregator(seed=trial)
    result = aggregator.weighted_average(vectors, list(gammas), round_index=trial)
    expected = sum(g * v for g, v in zip(gammas, vectors))
    assert np.max(np.abs(result - expected)) <= 1e-3


def test_aggregate_argument_errors():
    aggregator = SecureAggregator(seed=2)
    ct = aggregator.encrypt_update(np.ones(3))
    with pytest.raises(ContractError):
        aggregator.aggregate([ct], [0.5, 0.5])
    with pytest.raises(ContractError):
        aggregator.aggregate([], [])


def test_ciphertext_serialization(keys):
    ct = encrypt(keys.public, np.array([0.25, 4.0, -7.5]), np.random.default_rng(15))
    restored = Ciphertext.from_bytes(ct.to_bytes())
    np.testing.assert_array_equal(restored.c0, ct.c0)
    np.testing.assert_array_equal(restored.c1, ct.c1)
    assert (restored.length, restored.scale, restored.delta, restored.modulus) == (3, ct.scale, ct.delta, ct.modulus)
    np.testing.assert_allclose(decrypt(keys.secret, restored), [0.25, 4.0, -7.5], atol=1e-4)


def test_malformed_ciphertext_payloads(keys):
    payload = encrypt(keys.public, np.ones(2), np.random.default_rng(16)).to_bytes()
    with pytest.raises(ParseError):
        Ciphertext.from_bytes(b"XXXX" + payload[4:])
    with pytest.raises(ParseError):
        Ciphertext.from_bytes(payload[:-8])
    with pytest.raises(ParseError):
        Ciphertext.from_bytes(payload[:10])
