import numpy as np
from numpy.typing import NDArray

from .._errors import ContractError, DimensionError


# Flattened model weights: the unit of dispatch, encryption and aggregation.
ParameterVector = NDArray[np.float64]


def as_parameter_vector(values) -> ParameterVector:
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise DimensionError(f"parameter vectors are 1-D, got shape {vector.shape}")
    return vector


def sgd_step(params: ParameterVector, grads: ParameterVector, lr: float) -> ParameterVector:
    """Plain SGD: ``p' = p - lr * g``. Returns a new vector."""
    params = as_parameter_vector(params)
    grads = as_parameter_vector(grads)
    if params.shape != grads.shape:
        raise DimensionError(f"sgd_step: params length {params.size} != grads length {grads.size}")
    if lr < 0:
        raise ContractError(f"sgd_step: learning rate must be non-negative, got {lr}")
    return params - lr * grads
