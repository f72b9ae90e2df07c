from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from lsro_core.autodiff import Tensor
from lsro_core.config import TrainConfig
from lsro_core.errors import LabError, LabErrorCode

from .network import Network


def lr_at(epoch: int, cfg: TrainConfig) -> float:
    """Step schedule: lr_initial before decay_epoch, lr_after_decay from it on."""
    return cfg.lr_initial if epoch < cfg.decay_epoch else cfg.lr_after_decay


def _require_grads(params: Sequence[Tensor], who: str) -> None:
    missing = [i for i, p in enumerate(params) if p.grad is None]
    if missing:
        raise LabError(
            LabErrorCode.MISSING_GRAD,
            f"{who}: parameters {missing} have no gradient; run backward first",
            details_safe={"indices": missing},
        )


def sgd_momentum_step(net: Network, lr: float, momentum: float) -> None:
    """v <- momentum * v + grad; param <- param - lr * v; grads zeroed."""
    params = net.parameters()
    _require_grads(params, "sgd_momentum_step")
    for p, v in zip(params, net.momentum_buffers, strict=True):
        v *= momentum
        v += p.grad
        p.data -= lr * v
        p.zero_grad()


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def for_params(cls, params: Sequence[Tensor]) -> AdamState:
        return cls([np.zeros_like(p.data) for p in params], [np.zeros_like(p.data) for p in params])


@dataclass
class AdamOptimizer:
    params: list[Tensor]
    lr: float
    beta1: float = 0.5
    beta2: float = 0.99
    eps: float = 1e-8
    state: AdamState = field(init=False)

    def __post_init__(self) -> None:
        self.state = AdamState.for_params(self.params)

    def step(self) -> None:
        adam_step(self.params, self.state, self.lr, self.beta1, self.beta2, self.eps)


def adam_step(
    params: Sequence[Tensor],
    state: AdamState,
    lr: float,
    beta1: float,
    beta2: float,
    eps: float = 1e-8,
) -> None:
    """Adam with bias correction; increments ``state.t`` and zeroes grads."""
    _require_grads(params, "adam_step")
    state.t += 1
    c1 = 1.0 - beta1**state.t
    c2 = 1.0 - beta2**state.t
    for p, m, v in zip(params, state.m, state.v, strict=True):
        g = p.grad
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p.data -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
        p.zero_grad()
