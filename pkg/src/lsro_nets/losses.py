"""
Cross-entropy losses over softmax outputs.

All losses take predicted probabilities (post-softmax) as a Tensor or
array-like, route them through the guarded log and return a scalar Tensor
that can be backpropagated.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from lsro_core.autodiff import Tensor, as_tensor, guarded_log, mul, reduce_sum, scale
from lsro_core.errors import LabError, LabErrorCode, shape_error

from .labels import LabelDistribution, SourceFlag, lsr_distribution, one_hot


def _as_probs(p: Tensor | Any) -> Tensor:
    return as_tensor(p)


def _shaped(values: np.ndarray, like: Tensor) -> Tensor:
    return Tensor(np.asarray(values, dtype=np.float64).reshape(like.shape))


def _width(p: Tensor) -> int:
    return int(p.shape[-1]) if p.data.ndim == 1 or p.shape[0] == 1 else -1


def cross_entropy(p: Tensor | Any, q: LabelDistribution | Any) -> Tensor:
    """-sum_k q(k) log p(k)."""
    probs = _as_probs(p)
    target = q.probs if isinstance(q, LabelDistribution) else np.asarray(q, dtype=np.float64)
    if target.size != probs.data.size:
        raise shape_error("cross_entropy", probs.shape, target.shape)
    return scale(reduce_sum(mul(_shaped(target, probs), guarded_log(probs))), -1.0)


def lsro_loss(p: Tensor | Any, y: int | None, Z: SourceFlag | int, K: int) -> Tensor:
    """
    -(1 - Z) log p(y) - (Z / K) sum_k log p(k).

    A real sample (Z=0) must carry its class; a generated one (Z=1) must not.
    """
    z = SourceFlag(int(Z))
    if K < 2:
        raise LabError(LabErrorCode.INVALID_ARGUMENT, f"lsro_loss: class count K must be >= 2, got {K}")
    probs = _as_probs(p)
    if _width(probs) != K:
        raise shape_error("lsro_loss", probs.shape, (K,))
    log_p = guarded_log(probs)
    if z is SourceFlag.REAL:
        if y is None:
            raise LabError(LabErrorCode.INVALID_ARGUMENT, "lsro_loss: real sample (Z=0) needs a class index")
        picked = reduce_sum(mul(_shaped(one_hot(int(y), K).probs, probs), log_p))
        return scale(picked, -1.0)
    if y is not None:
        raise LabError(
            LabErrorCode.INVALID_ARGUMENT,
            f"lsro_loss: generated sample (Z=1) was given class {y}; outliers carry no label",
        )
    return scale(reduce_sum(log_p), -1.0 / K)


def lsr_loss(p: Tensor | Any, y: int, K: int, epsilon: float) -> Tensor:
    """-(1 - eps) log p(y) - (eps / K) sum_k log p(k)."""
    lsr_distribution(y, K, epsilon)
    probs = _as_probs(p)
    if _width(probs) != K:
        raise shape_error("lsr_loss", probs.shape, (K,))
    log_p = guarded_log(probs)
    truth = scale(reduce_sum(mul(_shaped(one_hot(y, K).probs, probs), log_p)), -(1.0 - epsilon))
    smooth = scale(reduce_sum(log_p), -epsilon / K)
    return truth + smooth


def pseudo_label(p: Tensor | Any) -> int:
    """Argmax class; ties go to the smallest index."""
    values = p.data if isinstance(p, Tensor) else np.asarray(p, dtype=np.float64)
    flat = values.reshape(-1)
    if flat.size == 0:
        raise LabError(LabErrorCode.INVALID_ARGUMENT, "pseudo_label: empty prediction")
    return int(np.argmax(flat))


def pseudo_labels(probs: np.ndarray) -> np.ndarray:
    return np.argmax(np.asarray(probs), axis=1).astype(np.int64)


def batch_cross_entropy(probs: Tensor, targets: np.ndarray, weights: np.ndarray) -> Tensor:
    """mean_i w_i * (-sum_k Q_ik log p_ik) over the rows of a batch."""
    if targets.shape != probs.shape:
        raise shape_error("batch_cross_entropy", probs.shape, targets.shape)
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    if weights.size != probs.shape[0]:
        raise shape_error("batch_cross_entropy", probs.shape, weights.shape)
    weighted = Tensor(targets * weights[:, None])
    return scale(reduce_sum(mul(weighted, guarded_log(probs))), -1.0 / probs.shape[0])
