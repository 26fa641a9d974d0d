from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .._errors import ParameterError


# deterministic Miller-Rabin witnesses for n < 3.3e24
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _WITNESSES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


class SchemeParams(BaseModel):
    """
    CKKS 风格 RLWE 方案参数（玩具级安全强度，仅用于演示协议）

    系数编码：实数乘以 Δ 取整后作为多项式系数；单模数、无重缩放，
    因此要求 Δ² · max_value < q/2，使一次明文乘法之后仍不发生回绕。
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    ring_degree: int = Field(default=1024, description="环维度 N，必须为 2 的幂")
    modulus: int = Field(default=2**59 - 55, description="系数模数 q，素数")
    delta: int = Field(default=2**25, ge=2, description="编码缩放因子 Δ")
    error_std: float = Field(default=3.2, gt=0.0, description="离散高斯误差标准差")
    max_value: float = Field(default=100.0, gt=0.0, description="可加密数值范围 [-R, R]")

    @field_validator("ring_degree")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value < 2 or value & (value - 1):
            raise ValueError(f"ring_degree must be a power of two, got {value}")
        return value

    @field_validator("modulus")
    @classmethod
    def _prime_modulus(cls, value: int) -> int:
        if value >= 2**62:
            raise ValueError("modulus must be below 2^62 so that sums fit in int64")
        if not is_probable_prime(value):
            raise ValueError(f"modulus {value} is not prime")
        return value

    @model_validator(mode="after")
    def _no_wraparound(self) -> "SchemeParams":
        if self.delta**2 * self.max_value >= self.modulus / 2:
            raise ValueError(
                f"delta^2 * max_value = {self.delta**2 * self.max_value:.3e} must stay below q/2 = {self.modulus / 2:.3e}"
            )
        return self

    @property
    def error_bound(self) -> int:
        """离散高斯采样的截断界 floor(6σ)"""
        return int(6 * self.error_std)

    @classmethod
    def checked(cls, **values) -> "SchemeParams":
        """构造参数，校验失败时抛出 ParameterError"""
        try:
            return cls(**values)
        except ValidationError as exc:
            raise ParameterError(f"invalid scheme parameters: {exc}") from None
