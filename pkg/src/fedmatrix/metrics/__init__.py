from ._metrics import (
    ConfusionCounts,
    BinaryScores,
    confusion,
    precision_recall_f1,
    minority_scores,
    predictions_from_log_probs,
)


__all__ = [
    "ConfusionCounts",
    "BinaryScores",
    "confusion",
    "precision_recall_f1",
    "minority_scores",
    "predictions_from_log_probs",
]
