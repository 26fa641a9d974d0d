from ._dataset import Dataset, datasets_fingerprint
from ._split import stratified_split
from ._synthetic import (
    DEFAULT_FEATURE_NAMES,
    SyntheticSpec,
    feature_names_for,
    generate_synthetic,
    minority_count,
)
from ._csv import LABEL_COLUMN, load_csv, write_csv


__all__ = [
    "Dataset",
    "datasets_fingerprint",
    "stratified_split",
    "DEFAULT_FEATURE_NAMES",
    "SyntheticSpec",
    "feature_names_for",
    "generate_synthetic",
    "minority_count",
    "LABEL_COLUMN",
    "load_csv",
    "write_csv",
]
