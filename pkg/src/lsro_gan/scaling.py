from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lsro_core.errors import LabError, LabErrorCode


@dataclass(frozen=True)
class FeatureScaler:
    """Per-coordinate affine map of the training box [lo, hi] onto [-1, 1]."""

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> FeatureScaler:
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] == 0:
            raise LabError(LabErrorCode.INVALID_ARGUMENT, f"cannot fit a scaler on shape {x.shape}")
        return cls(x.min(axis=0), x.max(axis=0))

    @property
    def span(self) -> np.ndarray:
        return self.hi - self.lo

    def transform(self, features: np.ndarray) -> np.ndarray:
        span = self.span
        safe = np.where(span > 0, span, 1.0)
        # constant coordinates map to 0
        return np.where(span > 0, 2.0 * (features - self.lo) / safe - 1.0, 0.0)

    def inverse(self, scaled: np.ndarray) -> np.ndarray:
        return self.lo + (np.asarray(scaled) + 1.0) * 0.5 * self.span
