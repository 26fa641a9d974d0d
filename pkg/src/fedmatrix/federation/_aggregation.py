from typing import Dict, Mapping

import numpy as np

from .._errors import ContractError, DimensionError
from ..numerics import ParameterVector
from ..secure_agg import SecureAggregator


def compute_gamma(sample_sizes: Mapping[int, int]) -> Dict[int, float]:
    """γ_k = N_k / Σ_{j∈S} N_j"""
    if not sample_sizes:
        raise ContractError("cannot weight an empty selection")
    if any(n <= 0 for n in sample_sizes.values()):
        raise ContractError(f"sample sizes must be positive, got {dict(sample_sizes)}")
    total = sum(sample_sizes.values())
    return {client_id: n / total for client_id, n in sorted(sample_sizes.items())}


def _check_updates(updates: Mapping[int, ParameterVector], gammas: Mapping[int, float]) -> None:
    if not updates:
        raise ContractError("nothing to aggregate")
    if set(updates) != set(gammas):
        raise ContractError(f"updates {sorted(updates)} and weights {sorted(gammas)} cover different clients")
    sizes = {np.asarray(v).size for v in updates.values()}
    if len(sizes) != 1:
        raise DimensionError(f"client updates have different lengths {sorted(sizes)}")


def aggregate_plaintext(updates: Mapping[int, ParameterVector], gammas: Mapping[int, float]) -> ParameterVector:
    """Σ γ_k·w_k，按客户端编号升序累加"""
    _check_updates(updates, gammas)
    ids = sorted(updates)
    total = np.zeros(np.asarray(updates[ids[0]]).size)
    for client_id in ids:
        total += gammas[client_id] * np.asarray(updates[client_id], dtype=np.float64)
    return total


def aggregate_encrypted(
    aggregator: SecureAggregator,
    updates: Mapping[int, ParameterVector],
    gammas: Mapping[int, float],
    *,
    round_index: int,
) -> ParameterVector:
    """客户端加密本地参数，服务器在密文上加权求和，解密得到新的全局参数"""
    _check_updates(updates, gammas)
    ids = sorted(updates)
    return aggregator.weighted_average(
        [updates[i] for i in ids],
        [gammas[i] for i in ids],
        client_ids=ids,
        round_index=round_index,
    )
