from .generate_data import generate_data
from .train import train
from .compare import compare
from .explain import explain

__all__ = ["generate_data", "train", "compare", "explain"]
