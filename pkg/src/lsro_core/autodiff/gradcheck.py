from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from lsro_core.errors import invalid

from .tensor import Tensor


def finite_difference_check(
    build: Callable[[list[Tensor]], Tensor],
    point: Sequence[np.ndarray],
    step: float = 1e-5,
) -> float:
    """
    Compare analytic gradients against central differences.

    ``build`` maps a list of parameter tensors to a scalar loss and must be
    deterministic (seed any dropout inside it). Returns
    max |analytic - numeric| / max(1, |analytic|) over every parameter entry.
    """
    if step <= 0:
        raise invalid(f"finite_difference_check: step must be positive, got {step}")

    base = [np.array(p, dtype=np.float64) for p in point]
    params = [Tensor(p, requires_grad=True) for p in base]
    build(params).backward()

    def evaluate(values: list[np.ndarray]) -> float:
        return build([Tensor(v) for v in values]).item()

    worst = 0.0
    for i, param in enumerate(params):
        analytic = param.grad if param.grad is not None else np.zeros_like(base[i])
        for idx in np.ndindex(base[i].shape):
            plus = [b.copy() for b in base]
            minus = [b.copy() for b in base]
            plus[i][idx] += step
            minus[i][idx] -= step
            numeric = (evaluate(plus) - evaluate(minus)) / (2.0 * step)
            a = float(analytic[idx])
            worst = max(worst, abs(a - numeric) / max(1.0, abs(a)))
    return worst
