from .._errors import ContractError
from ._config import FederationConfig, MuMode


def mu_schedule(t: int, config: FederationConfig) -> float:
    """μ_t = min(mu_step·t, mu_cap)，单调不减并在 mu_cap 处饱和"""
    if t < 0:
        raise ContractError(f"round index must be >= 0, got {t}")
    # rounding keeps decimal steps exact, e.g. 0.0002 * 50 == 0.01
    return min(round(config.mu_step * t, 12), config.mu_cap)


def mu_for_round(t: int, config: FederationConfig) -> float:
    """按 mu_mode 给出第 t 轮本地训练使用的 μ"""
    if config.mu_mode == MuMode.VARYING:
        return mu_schedule(t, config)
    if config.mu_mode == MuMode.FIXED:
        return config.mu_cap
    return 0.0
