from typing import Callable, Dict, Mapping, Tuple

import numpy as np

from .._errors import ContractError
from ._config import SelectionStrategy


ClientSelector = Callable[[Mapping[int, float], int, np.random.Generator], Tuple[int, ...]]


def _check_m(m: int, k: int) -> None:
    if m < 1:
        raise ContractError(f"must select at least one client, got M={m}")
    if m > k:
        raise ContractError(f"cannot select M={m} clients out of K={k}")


def select_clients_pbcs(f1_by_client: Mapping[int, float], m: int) -> Tuple[int, ...]:
    """F1 最高的 M 个客户端，F1 相同按编号升序；返回升序编号"""
    _check_m(m, len(f1_by_client))
    ranked = sorted(f1_by_client.items(), key=lambda item: (-item[1], item[0]))
    return tuple(sorted(client_id for client_id, _ in ranked[:m]))


def select_clients_random(k: int, m: int, rng: np.random.Generator) -> Tuple[int, ...]:
    """不放回地均匀抽取 M 个客户端"""
    _check_m(m, k)
    return tuple(sorted(int(i) for i in rng.choice(k, size=m, replace=False)))


def _pbcs(f1_by_client: Mapping[int, float], m: int, rng: np.random.Generator) -> Tuple[int, ...]:
    return select_clients_pbcs(f1_by_client, m)


def _random(f1_by_client: Mapping[int, float], m: int, rng: np.random.Generator) -> Tuple[int, ...]:
    ids = sorted(f1_by_client)
    picked = select_clients_random(len(ids), m, rng)
    return tuple(ids[i] for i in picked)


BUILTIN_SELECTORS: Dict[str, ClientSelector] = {
    SelectionStrategy.PBCS.value: _pbcs,
    SelectionStrategy.RANDOM.value: _random,
}


class SelectorProvider:
    """按名称从注册表中取出客户端选择策略"""

    def __init__(self, registry):
        self.registry = registry

    def __call__(self, name: str) -> ClientSelector:
        return self.registry.get_selector(name)
