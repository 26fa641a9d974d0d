"""Arithmetic in Z_q[X]/(X^N + 1) on int64 coefficient vectors."""
from typing import List

import numpy as np

from .._errors import DimensionError


LIMB_BITS = 20
_LIMB_MASK = (1 << LIMB_BITS) - 1


def reduce(x: np.ndarray, modulus: int) -> np.ndarray:
    """Representative in [0, q)."""
    return np.mod(np.asarray(x, dtype=np.int64), modulus)


def center(x: np.ndarray, modulus: int) -> np.ndarray:
    """Centered lift into (-q/2, q/2]."""
    x = reduce(x, modulus)
    return np.where(x > modulus // 2, x - modulus, x)


def _split_limbs(x: np.ndarray) -> List[np.ndarray]:
    # sign-magnitude limbs: x == sum(limb_i * 2^(LIMB_BITS * i))
    sign = np.sign(x)
    magnitude = np.abs(x)
    limbs = []
    while True:
        limbs.append(sign * (magnitude & _LIMB_MASK))
        magnitude = magnitude >> LIMB_BITS
        if not magnitude.any():
            return limbs


def _negacyclic_fold(full: np.ndarray, n: int) -> np.ndarray:
    folded = full[:n].copy()
    folded[: n - 1] -= full[n:]
    return folded


def negacyclic_multiply(x: np.ndarray, y: np.ndarray, modulus: int) -> np.ndarray:
    """
    Product of two ring elements, reduced into [0, q).

    Operands are centered and split into signed 20-bit limbs so that every
    limb convolution stays exact in int64; limb products are recombined with
    Python integers.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 1 or x.shape != y.shape:
        raise DimensionError(f"ring elements must be 1-D of equal length, got {x.shape} and {y.shape}")
    n = x.size

    x_limbs = _split_limbs(center(x, modulus))
    y_limbs = _split_limbs(center(y, modulus))
    partial = [np.zeros(n, dtype=np.int64) for _ in range(len(x_limbs) + len(y_limbs) - 1)]
    for i, xi in enumerate(x_limbs):
        for j, yj in enumerate(y_limbs):
            partial[i + j] += _negacyclic_fold(np.convolve(xi, yj), n)

    total = np.zeros(n, dtype=object)
    for k, part in enumerate(partial):
        total += part.astype(object) * (1 << (LIMB_BITS * k))
    return (total % modulus).astype(np.int64)


def multiply_scalar(x: np.ndarray, scalar: int, modulus: int) -> np.ndarray:
    """x · scalar mod q, coefficient-wise."""
    product = np.asarray(x, dtype=np.int64).astype(object) * int(scalar)
    return (product % modulus).astype(np.int64)


def sample_ternary(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(-1, 2, size=n, dtype=np.int64)


def sample_gaussian(rng: np.random.Generator, n: int, std: float, bound: int) -> np.ndarray:
    """Rounded normal samples clipped to [-bound, bound]."""
    return np.clip(np.rint(rng.normal(0.0, std, size=n)), -bound, bound).astype(np.int64)


def sample_uniform(rng: np.random.Generator, n: int, modulus: int) -> np.ndarray:
    return rng.integers(0, modulus, size=n, dtype=np.int64)
