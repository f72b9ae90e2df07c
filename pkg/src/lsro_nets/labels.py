"""
Label distributions over the training classes.

Probabilities are built from exact rationals so that every distribution sums
to one exactly; ``probs`` is the float64 view used by the losses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from fractions import Fraction

import numpy as np

from lsro_core.errors import LabError, LabErrorCode


class SourceFlag(IntEnum):
    """Z: 0 for a real training sample, 1 for a generated (outlier) sample."""

    REAL = 0
    GENERATED = 1


class DistributionKind(str, Enum):
    ONE_HOT = "one_hot"
    LSR = "lsr"
    LSRO_UNIFORM = "lsro_uniform"


@dataclass(frozen=True)
class LabelDistribution:
    exact: tuple[Fraction, ...]
    kind: DistributionKind
    probs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if any(p < 0 for p in self.exact) or sum(self.exact, Fraction(0)) != 1:
            raise LabError(LabErrorCode.INTERNAL_ERROR, f"not a distribution: {self.exact}")
        probs = np.array([float(p) for p in self.exact], dtype=np.float64)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.exact)


def _check_classes(K: int, minimum: int = 2) -> None:
    if K < minimum:
        raise LabError(LabErrorCode.INVALID_ARGUMENT, f"class count K must be >= {minimum}, got {K}")


def _check_index(y: int, K: int) -> None:
    if not 0 <= y < K:
        raise LabError(LabErrorCode.INVALID_ARGUMENT, f"class index {y} out of range for K={K}")


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 <= epsilon <= 1.0:
        raise LabError(LabErrorCode.INVALID_ARGUMENT, f"smoothing epsilon must lie in [0, 1], got {epsilon}")


def one_hot(y: int, K: int) -> LabelDistribution:
    _check_classes(K)
    _check_index(y, K)
    return LabelDistribution(
        tuple(Fraction(1) if k == y else Fraction(0) for k in range(K)),
        DistributionKind.ONE_HOT,
    )


def lsr_distribution(y: int, K: int, epsilon: float) -> LabelDistribution:
    _check_classes(K)
    _check_index(y, K)
    _check_epsilon(epsilon)
    eps = Fraction(epsilon)
    off = eps / K
    return LabelDistribution(
        tuple(1 - eps + off if k == y else off for k in range(K)),
        DistributionKind.LSR,
    )


def lsro_distribution(K: int) -> LabelDistribution:
    _check_classes(K)
    return LabelDistribution(tuple(Fraction(1, K) for _ in range(K)), DistributionKind.LSRO_UNIFORM)


def all_in_one_label(K: int) -> LabelDistribution:
    """Every generated sample goes to the extra class K of a K+1 head."""
    _check_classes(K)
    return one_hot(K, K + 1)


# Row builders for whole batches; entries match the scalar constructors above.


def one_hot_rows(ys: np.ndarray, num_classes: int) -> np.ndarray:
    ys = np.asarray(ys, dtype=np.int64)
    if ys.size and (ys.min() < 0 or ys.max() >= num_classes):
        raise LabError(LabErrorCode.INVALID_ARGUMENT, f"class index out of range for K={num_classes}")
    rows = np.zeros((ys.size, num_classes), dtype=np.float64)
    rows[np.arange(ys.size), ys] = 1.0
    return rows


def lsr_rows(ys: np.ndarray, num_classes: int, epsilon: float) -> np.ndarray:
    _check_epsilon(epsilon)
    if epsilon == 0.0:
        return one_hot_rows(ys, num_classes)
    reference = lsr_distribution(0, num_classes, epsilon).probs
    off, on = reference[1], reference[0]
    rows = np.full((len(ys), num_classes), off, dtype=np.float64)
    rows[np.arange(len(ys)), np.asarray(ys, dtype=np.int64)] = on
    return rows


def uniform_rows(n: int, num_classes: int) -> np.ndarray:
    return np.tile(lsro_distribution(num_classes).probs, (n, 1))
