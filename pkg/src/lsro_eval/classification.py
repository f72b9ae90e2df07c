from __future__ import annotations

import numpy as np

from lsro_core.errors import LabError, LabErrorCode


def top1_accuracy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of rows whose argmax (smallest index on ties) equals the label."""
    probs = np.atleast_2d(np.asarray(probs, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if probs.shape[0] != labels.size:
        raise LabError(
            LabErrorCode.SHAPE_MISMATCH,
            f"top1_accuracy: {probs.shape[0]} probability rows for {labels.size} labels",
        )
    if labels.size == 0:
        return float("nan")
    return float(np.mean(np.argmax(probs, axis=1) == labels))
