from typing import Optional, Sequence

import numpy as np
from loguru import logger

from .._errors import ContractError
from ..utils import substream
from ._ciphertext import Ciphertext
from ._params import SchemeParams
from ._scheme import KeyPair, add, decrypt, encrypt, keygen, scale_by_plain


class SecureAggregator:
    """
    加权聚合的同态加密封装：客户端用公钥加密参数，服务器只做密文加权求和，
    持有私钥的参与方解密出全局模型

    注意：协议中所有参与方共享同一私钥，任一客户端都能解密其他客户端的参数，
    这里仅演示协议流程，不提供对参与方之间的保密性。
    """

    def __init__(self, params: Optional[SchemeParams] = None, *, seed: int = 0):
        self.params = params or SchemeParams()
        self.keys: KeyPair = keygen(self.params, substream(seed, "crypto", "keygen"))
        self._seed = seed

    def encrypt_update(self, vector: np.ndarray, *, client_id: int = 0, round_index: int = 0) -> Ciphertext:
        rng = substream(self._seed, "crypto", "encrypt", round_index, client_id)
        return encrypt(self.keys.public, vector, rng)

    def aggregate(self, ciphertexts: Sequence[Ciphertext], gammas: Sequence[float]) -> Ciphertext:
        """Σ_k γ_k · E(w_k)，不接触任何明文"""
        if len(ciphertexts) != len(gammas):
            raise ContractError(f"{len(ciphertexts)} ciphertexts but {len(gammas)} weights")
        if not ciphertexts:
            raise ContractError("nothing to aggregate")
        total = scale_by_plain(ciphertexts[0], gammas[0])
        for ct, gamma in zip(ciphertexts[1:], gammas[1:]):
            total = add(total, scale_by_plain(ct, gamma))
        logger.debug(f"Aggregated {len(ciphertexts)} encrypted updates over {total.num_chunks} chunk(s)")
        return total

    def decrypt_aggregate(self, ct: Ciphertext) -> np.ndarray:
        return decrypt(self.keys.secret, ct)

    def weighted_average(
        self,
        vectors: Sequence[np.ndarray],
        gammas: Sequence[float],
        *,
        client_ids: Optional[Sequence[int]] = None,
        round_index: int = 0,
    ) -> np.ndarray:
        """加密 → 密文加权求和 → 解密的完整流程"""
        client_ids = list(client_ids) if client_ids is not None else list(range(len(vectors)))
        ciphertexts = [
            self.encrypt_update(v, client_id=cid, round_index=round_index)
            for v, cid in zip(vectors, client_ids)
        ]
        return self.decrypt_aggregate(self.aggregate(ciphertexts, gammas))
