import math
from dataclasses import dataclass, field

import numpy as np

from .._errors import ContractError, DimensionError, ParameterError, RangeError
from ._ciphertext import Ciphertext
from ._params import SchemeParams
from . import _ring as ring


@dataclass(kw_only=True, frozen=True)
class PublicKey:
    params: SchemeParams
    b: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)


@dataclass(kw_only=True, frozen=True)
class SecretKey:
    params: SchemeParams
    s: np.ndarray = field(repr=False)


@dataclass(kw_only=True, frozen=True)
class KeyPair:
    """``public = (b, a)``，其中 ``b = -a·s + e (mod q)``，``s`` 为三值多项式"""
    public: PublicKey
    secret: SecretKey

    @property
    def params(self) -> SchemeParams:
        return self.public.params


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.int64)
    array.flags.writeable = False
    return array


def keygen(params: SchemeParams, rng: np.random.Generator) -> KeyPair:
    if not isinstance(params, SchemeParams):
        raise ParameterError(f"expected SchemeParams, got {type(params).__name__}")
    n, q = params.ring_degree, params.modulus
    s = ring.sample_ternary(rng, n)
    a = ring.sample_uniform(rng, n, q)
    e = ring.sample_gaussian(rng, n, params.error_std, params.error_bound)
    b = ring.reduce(e - ring.negacyclic_multiply(a, s, q), q)
    return KeyPair(
        public=PublicKey(params=params, b=_frozen(b), a=_frozen(a)),
        secret=SecretKey(params=params, s=_frozen(s)),
    )


def encode(values: np.ndarray, params: SchemeParams) -> np.ndarray:
    """实数向量 → 形状 (chunks, N) 的整数系数矩阵（末尾补 0）"""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise DimensionError(f"only 1-D vectors can be encrypted, got shape {values.shape}")
    if values.size == 0:
        raise ContractError("cannot encrypt an empty vector")
    if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > params.max_value:
        worst = float(np.max(np.abs(np.nan_to_num(values, nan=np.inf))))
        raise RangeError(f"values must lie in [-{params.max_value}, {params.max_value}], found magnitude {worst}")

    n = params.ring_degree
    chunks = math.ceil(values.size / n)
    padded = np.zeros(chunks * n, dtype=np.float64)
    padded[: values.size] = values
    return np.rint(padded * params.delta).astype(np.int64).reshape(chunks, n)


def encrypt(pk: PublicKey, values: np.ndarray, rng: np.random.Generator) -> Ciphertext:
    """
    对实数向量做系数编码后逐块 RLWE 加密

    ``c0 = b·u + e1 + Δm``，``c1 = a·u + e2``，每块独立采样 ``u, e1, e2``。

    Raises:
        RangeError: 存在超出 [-R, R] 或非有限的值
    """
    params = pk.params
    n, q = params.ring_degree, params.modulus
    plain = encode(values, params)

    c0 = np.empty_like(plain)
    c1 = np.empty_like(plain)
    for i, chunk in enumerate(plain):
        u = ring.sample_ternary(rng, n)
        e1 = ring.sample_gaussian(rng, n, params.error_std, params.error_bound)
        e2 = ring.sample_gaussian(rng, n, params.error_std, params.error_bound)
        c0[i] = ring.reduce(ring.negacyclic_multiply(pk.b, u, q) + e1 + chunk, q)
        c1[i] = ring.reduce(ring.negacyclic_multiply(pk.a, u, q) + e2, q)
    return Ciphertext(
        c0=c0, c1=c1, length=int(np.asarray(values).size), scale=params.delta, delta=params.delta, modulus=q,
    )


def add(ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
    ct1.check_compatible(ct2)
    q = ct1.modulus
    return Ciphertext(
        c0=ring.reduce(ct1.c0 + ct2.c0, q),
        c1=ring.reduce(ct1.c1 + ct2.c1, q),
        length=ct1.length,
        scale=ct1.scale,
        delta=ct1.delta,
        modulus=q,
    )


def scale_by_plain(ct: Ciphertext, gamma: float) -> Ciphertext:
    """
    乘以明文标量 γ ∈ [0, 1]：每块乘以 round(γ·Δ)，缩放变为 scale·Δ

    Raises:
        ContractError: γ 超出 [0, 1]，或密文已经乘过一次明文
    """
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise ContractError(f"gamma must lie in [0, 1], got {gamma}")
    if ct.scale != ct.delta:
        raise ContractError(f"ciphertext at scale {ct.scale} was already multiplied by a plaintext")
    encoded = int(round(gamma * ct.delta))
    q = ct.modulus
    return Ciphertext(
        c0=ring.multiply_scalar(ct.c0, encoded, q),
        c1=ring.multiply_scalar(ct.c1, encoded, q),
        length=ct.length,
        scale=ct.scale * ct.delta,
        delta=ct.delta,
        modulus=q,
    )


def decrypt(sk: SecretKey, ct: Ciphertext) -> np.ndarray:
    """``c0 + c1·s (mod q)``，中心提升后除以当前缩放并截断到原始长度"""
    if ct.scale == 0:
        raise ContractError("cannot decrypt a ciphertext with zero scale")
    params = sk.params
    if (ct.ring_degree, ct.modulus) != (params.ring_degree, params.modulus):
        raise ContractError("ciphertext does not match the secret key's scheme parameters")
    q = ct.modulus
    chunks = [
        ring.center(c0 + ring.negacyclic_multiply(c1, sk.s, q), q)
        for c0, c1 in zip(ct.c0, ct.c1)
    ]
    coefficients = np.concatenate(chunks)
    return (coefficients.astype(np.float64) / float(ct.scale))[: ct.length]
