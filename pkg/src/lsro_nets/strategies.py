"""
How generated samples enter training.

Each strategy decides whether generated samples are in the pool for an epoch
and which target distribution / weight they carry. Real samples always use
one-hot (or LSR when ``lsr_epsilon`` > 0) over the full head.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import ClassVar

import numpy as np

from lsro_core.config import TrainConfig
from lsro_core.errors import LabError, LabErrorCode

from .labels import all_in_one_label, one_hot_rows, uniform_rows
from .losses import pseudo_labels


class OutlierStrategy(ABC):
    key: ClassVar[str]
    extra_classes: ClassVar[int] = 0
    accepts_generated: ClassVar[bool] = True
    # generated targets depend on an eval-mode (dropout off) prediction of the batch
    needs_prediction: ClassVar[bool] = False

    def head_size(self, num_real_classes: int) -> int:
        return num_real_classes + self.extra_classes

    def uses_generated(self, epoch: int, cfg: TrainConfig) -> bool:
        return self.accepts_generated

    @abstractmethod
    def generated_targets(
        self, probs: np.ndarray, num_real_classes: int, cfg: TrainConfig
    ) -> tuple[np.ndarray, np.ndarray]:
        """Targets (rows x head) and per-row weights for generated rows, given current predictions."""


_REGISTRY: dict[str, type[OutlierStrategy]] = {}


def register_strategy(cls: type[OutlierStrategy]) -> type[OutlierStrategy]:
    _REGISTRY[cls.key] = cls
    return cls


def get_strategy(key: str) -> OutlierStrategy:
    if key not in _REGISTRY:
        raise LabError(
            LabErrorCode.INVALID_ARGUMENT,
            f"strategy {key!r} not registered; known: {', '.join(sorted(_REGISTRY))}",
        )
    return _REGISTRY[key]()


def strategy_keys() -> list[str]:
    return list(_REGISTRY)


@register_strategy
class Baseline(OutlierStrategy):
    key = "baseline"
    accepts_generated = False

    def generated_targets(self, probs, num_real_classes, cfg):
        raise LabError(LabErrorCode.INVALID_ARGUMENT, "baseline strategy does not train on generated samples")


@register_strategy
class Lsro(OutlierStrategy):
    """Uniform 1/K target over the K real classes."""

    key = "lsro"

    def generated_targets(self, probs, num_real_classes, cfg):
        n = probs.shape[0]
        return uniform_rows(n, num_real_classes), np.ones(n)


@register_strategy
class AllInOne(OutlierStrategy):
    """Every generated sample is class K of a K+1 head."""

    key = "all_in_one"
    extra_classes = 1

    def generated_targets(self, probs, num_real_classes, cfg):
        n = probs.shape[0]
        return np.tile(all_in_one_label(num_real_classes).probs, (n, 1)), np.ones(n)


@register_strategy
class PseudoLabel(OutlierStrategy):
    """Argmax of the current eval-mode prediction, recomputed every batch, after a warm-up."""

    key = "pseudo_label"
    needs_prediction = True

    def uses_generated(self, epoch, cfg):
        return epoch >= cfg.pseudo_warmup_epochs

    def generated_targets(self, probs, num_real_classes, cfg):
        n = probs.shape[0]
        return one_hot_rows(pseudo_labels(probs), num_real_classes), np.full(n, cfg.pseudo_weight)


def target_matrix(
    strategy: OutlierStrategy,
    probs: np.ndarray,
    is_real: np.ndarray,
    real_targets: np.ndarray,
    num_real_classes: int,
    cfg: TrainConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Target rows and weights for one mixed batch.

    ``real_targets`` holds the rows of the real entries in batch order;
    generated rows get whatever ``strategy`` assigns from ``probs``.
    """
    is_real = np.asarray(is_real, dtype=bool)
    targets = np.empty_like(probs, dtype=np.float64)
    weights = np.ones(probs.shape[0])
    targets[is_real] = real_targets
    if not is_real.all():
        gen = ~is_real
        targets[gen], weights[gen] = strategy.generated_targets(probs[gen], num_real_classes, cfg)
    return targets, weights
