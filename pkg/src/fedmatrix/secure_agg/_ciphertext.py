import struct
from dataclasses import dataclass, field

import numpy as np

from .._errors import ContractError, DimensionError, ParseError


MAGIC = b"FMCT"
FORMAT_VERSION = 1
# ring_degree, modulus, delta, scale, chunk count, vector length
_HEADER = struct.Struct("<4sI6q")


@dataclass(kw_only=True, frozen=True)
class Ciphertext:
    """
    按块加密的实数向量

    Args:
        c0, c1: 形状 (chunks, N) 的系数矩阵，取值 [0, q)
        length: 原始向量长度（最后一块以 0 填充）
        scale: 当前缩放（新鲜密文为 Δ，乘以明文标量后为 Δ²）
        delta: 编码缩放因子 Δ
        modulus: 系数模数 q
    """
    c0: np.ndarray = field(repr=False)
    c1: np.ndarray = field(repr=False)
    length: int
    scale: int
    delta: int
    modulus: int

    def __post_init__(self):
        c0 = np.array(self.c0, dtype=np.int64)
        c1 = np.array(self.c1, dtype=np.int64)
        if c0.ndim != 2 or c0.shape != c1.shape:
            raise DimensionError(f"c0 {c0.shape} and c1 {c1.shape} must be equal (chunks, N) matrices")
        if not 0 < self.length <= c0.size:
            raise DimensionError(f"length {self.length} does not fit {c0.shape[0]} chunk(s) of {c0.shape[1]}")
        c0.flags.writeable = False
        c1.flags.writeable = False
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)

    @property
    def num_chunks(self) -> int:
        return int(self.c0.shape[0])

    @property
    def ring_degree(self) -> int:
        return int(self.c0.shape[1])

    def check_compatible(self, other: "Ciphertext") -> None:
        """同布局且同缩放才允许同态相加"""
        if (self.ring_degree, self.modulus, self.delta) != (other.ring_degree, other.modulus, other.delta):
            raise ContractError("ciphertexts were produced under different scheme parameters")
        if (self.num_chunks, self.length) != (other.num_chunks, other.length):
            raise ContractError(
                f"chunk layout mismatch: ({self.num_chunks}, {self.length}) vs ({other.num_chunks}, {other.length})"
            )
        if self.scale != other.scale:
            raise ContractError(f"scale mismatch: {self.scale} vs {other.scale}")

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(
            MAGIC, FORMAT_VERSION,
            self.ring_degree, self.modulus, self.delta, self.scale, self.num_chunks, self.length,
        )
        return header + self.c0.astype("<i8").tobytes() + self.c1.astype("<i8").tobytes()

    @classmethod
    def from_bytes(cls, payload: bytes) -> "Ciphertext":
        if len(payload) < _HEADER.size:
            raise ParseError(f"ciphertext payload too short ({len(payload)} bytes)")
        magic, version, n, modulus, delta, scale, chunks, length = _HEADER.unpack_from(payload)
        if magic != MAGIC:
            raise ParseError(f"bad ciphertext magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ParseError(f"unsupported ciphertext format version {version}")
        if n <= 0 or chunks <= 0:
            raise ParseError(f"invalid ciphertext layout N={n}, chunks={chunks}")
        expected = _HEADER.size + 2 * chunks * n * 8
        if len(payload) != expected:
            raise ParseError(f"ciphertext payload has {len(payload)} bytes, expected {expected}")
        body = np.frombuffer(payload, dtype="<i8", offset=_HEADER.size).reshape(2, chunks, n)
        try:
            return cls(
                c0=body[0], c1=body[1], length=length, scale=scale, delta=delta, modulus=modulus,
            )
        except DimensionError as exc:
            raise ParseError(str(exc)) from None
