from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from lsro_core.autodiff import ACTIVATIONS, Tensor, add, matmul
from lsro_core.errors import LabError, LabErrorCode, invalid


@dataclass
class DenseLayer:
    weight: Tensor  # fan_in x fan_out
    bias: Tensor  # 1 x fan_out
    activation: str | None = None

    @property
    def fan_in(self) -> int:
        return self.weight.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weight.shape[1]

    def __call__(self, x: Tensor) -> Tensor:
        # bias broadcast as ones(m, 1) @ b keeps every op shape-exact
        ones = Tensor(np.ones((x.shape[0], 1)))
        out = add(matmul(x, self.weight), matmul(ones, self.bias))
        if self.activation is None:
            return out
        return ACTIVATIONS[self.activation](out)


def glorot_layer(
    fan_in: int, fan_out: int, rng: np.random.Generator, activation: str | None = None
) -> DenseLayer:
    """Uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); zero bias."""
    if fan_in < 1 or fan_out < 1:
        raise invalid(f"layer dimensions must be positive, got {fan_in} x {fan_out}")
    if activation is not None and activation not in ACTIVATIONS:
        raise invalid(f"unknown activation {activation!r}")
    a = np.sqrt(6.0 / (fan_in + fan_out))
    return DenseLayer(
        Tensor(rng.uniform(-a, a, size=(fan_in, fan_out)), requires_grad=True),
        Tensor(np.zeros((1, fan_out)), requires_grad=True),
        activation,
    )


class DenseStack:
    """Feedforward stack of dense layers; the building block of every network here."""

    def __init__(self, layers: Sequence[DenseLayer]):
        self.layers = list(layers)
        for prev, nxt in zip(self.layers, self.layers[1:], strict=False):
            if prev.fan_out != nxt.fan_in:
                raise LabError(
                    LabErrorCode.SHAPE_MISMATCH,
                    f"layer widths do not chain: {prev.fan_out} -> {nxt.fan_in}",
                )

    @classmethod
    def build(
        cls,
        dims: Sequence[int],
        activations: Sequence[str | None],
        rng: np.random.Generator,
    ) -> DenseStack:
        if len(activations) != len(dims) - 1:
            raise invalid(f"{len(dims) - 1} layers need as many activations, got {len(activations)}")
        return cls([glorot_layer(i, o, rng, act) for i, o, act in zip(dims, dims[1:], activations, strict=False)])

    @property
    def input_dim(self) -> int:
        return self.layers[0].fan_in

    @property
    def output_dim(self) -> int:
        return self.layers[-1].fan_out

    def parameters(self) -> list[Tensor]:
        params: list[Tensor] = []
        for layer in self.layers:
            params.extend((layer.weight, layer.bias))
        return params

    def __call__(self, x: Tensor) -> Tensor:
        if x.data.ndim != 2 or x.shape[1] != self.input_dim:
            raise LabError(
                LabErrorCode.SHAPE_MISMATCH,
                f"input width {x.shape[-1]} does not match network input_dim {self.input_dim}",
                details_safe={"shape": list(x.shape), "input_dim": self.input_dim},
            )
        for layer in self.layers:
            x = layer(x)
        return x

    def load_arrays(self, arrays: Sequence[np.ndarray]) -> None:
        params = self.parameters()
        if len(arrays) != len(params):
            raise invalid(f"expected {len(params)} parameter arrays, got {len(arrays)}")
        for p, arr in zip(params, arrays, strict=True):
            if p.shape != arr.shape:
                raise LabError(LabErrorCode.SHAPE_MISMATCH, f"parameter shape {arr.shape} != {p.shape}")
            p.data = np.array(arr, dtype=np.float64)
