import zlib
from typing import Union

import numpy as np


StreamKey = Union[str, int]


def _key_to_int(key: StreamKey) -> int:
    if isinstance(key, bool):
        raise TypeError("stream keys must be str or int, not bool")
    if isinstance(key, int):
        if key < 0:
            raise ValueError(f"integer stream keys must be non-negative, got {key}")
        return key
    return zlib.crc32(key.encode("utf-8"))


def seed_sequence(root_seed: int, *names: StreamKey) -> np.random.SeedSequence:
    """
    从根种子派生命名子流

    Args:
        root_seed: 实验的根种子
        names: 子流名称路径，例如 ("train", 3, 1) 表示第3轮、客户端1的本地训练

    Returns:
        与名称路径一一对应的 SeedSequence，不同路径之间统计独立
    """
    return np.random.SeedSequence(entropy=root_seed, spawn_key=tuple(_key_to_int(n) for n in names))


def substream(root_seed: int, *names: StreamKey) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(root_seed, *names))
