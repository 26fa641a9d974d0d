from ._config import (
    AggregationMode,
    FederationConfig,
    FederationStrategy,
    MuMode,
    SelectionStrategy,
)
from ._schedule import mu_schedule, mu_for_round
from ._client import ClientState, make_client_states, evaluate_local_f1, train_local
from ._selection import (
    BUILTIN_SELECTORS,
    ClientSelector,
    SelectorProvider,
    select_clients_pbcs,
    select_clients_random,
)
from ._aggregation import compute_gamma, aggregate_plaintext, aggregate_encrypted
from ._server import (
    ROUND_LOG_COLUMNS,
    Federation,
    FederationState,
    RoundRecord,
    TrainingResult,
    round_log_frame,
    write_round_log,
)


__all__ = [
    "AggregationMode",
    "FederationConfig",
    "FederationStrategy",
    "MuMode",
    "SelectionStrategy",
    "mu_schedule",
    "mu_for_round",
    "ClientState",
    "make_client_states",
    "evaluate_local_f1",
    "train_local",
    "BUILTIN_SELECTORS",
    "ClientSelector",
    "SelectorProvider",
    "select_clients_pbcs",
    "select_clients_random",
    "compute_gamma",
    "aggregate_plaintext",
    "aggregate_encrypted",
    "ROUND_LOG_COLUMNS",
    "Federation",
    "FederationState",
    "RoundRecord",
    "TrainingResult",
    "round_log_frame",
    "write_round_log",
]
