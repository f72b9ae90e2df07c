"""
Embedder with a classifier head.

    x -> [dense + activation] * len(hidden_dims) -> dense (embedding)
      -> dropout (train mode only) -> dense (logits) -> softmax

The embedding is the linear output tapped before dropout and the head.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lsro_core.autodiff import Tensor, dropout, softmax_rows
from lsro_core.config import NetworkConfig
from lsro_core.errors import LabError, LabErrorCode, invalid

from .layers import DenseStack, glorot_layer


class Network:
    def __init__(self, config: NetworkConfig, trunk: DenseStack, head: DenseStack):
        self.config = config
        self.trunk = trunk
        self.head = head
        self.momentum_buffers = [np.zeros_like(p.data) for p in self.parameters()]

    @property
    def layers(self) -> list:
        return [*self.trunk.layers, *self.head.layers]

    def parameters(self) -> list[Tensor]:
        return [*self.trunk.parameters(), *self.head.parameters()]

    def parameter_count(self) -> int:
        return int(sum(p.data.size for p in self.parameters()))

    def forward(
        self,
        batch: np.ndarray | Tensor,
        train_mode: bool = False,
        rng: np.random.Generator | None = None,
    ) -> tuple[Tensor, Tensor]:
        x = batch if isinstance(batch, Tensor) else Tensor(np.atleast_2d(np.asarray(batch, dtype=np.float64)))
        embeddings = self.trunk(x)
        dropped = dropout(embeddings, self.config.dropout_rate, train=train_mode, rng=rng)
        return embeddings, softmax_rows(self.head(dropped))


def expected_parameter_count(config: NetworkConfig) -> int:
    """Number of scalars ``build_network`` allocates for ``config``, computed without allocating."""
    input_dim, num_classes = _require_resolved(config)
    dims = [input_dim, *config.hidden_dims, config.embed_dim, num_classes]
    return sum(fan_in * fan_out + fan_out for fan_in, fan_out in zip(dims, dims[1:], strict=False))


def _require_resolved(config: NetworkConfig) -> tuple[int, int]:
    if config.input_dim is None or config.num_classes is None:
        raise invalid("network config needs input_dim and num_classes before building")
    return config.input_dim, config.num_classes


def build_network(config: NetworkConfig, rng: np.random.Generator) -> Network:
    input_dim, num_classes = _require_resolved(config)
    dims = [input_dim, *config.hidden_dims, config.embed_dim]
    activations: list[str | None] = [config.activation] * len(config.hidden_dims) + [None]
    trunk = DenseStack.build(dims, activations, rng)
    head = DenseStack([glorot_layer(config.embed_dim, num_classes, rng)])
    return Network(config, trunk, head)


def forward(net: Network, batch: np.ndarray, train_mode: bool = False, rng: np.random.Generator | None = None):
    return net.forward(batch, train_mode=train_mode, rng=rng)


def _features(samples) -> np.ndarray:
    feats = samples.features if hasattr(samples, "features") else samples
    return np.atleast_2d(np.asarray(feats, dtype=np.float64))


def extract_embeddings(net: Network, samples) -> np.ndarray:
    """One eval-mode embedding row per sample."""
    x = _features(samples)
    if x.shape[0] == 0:
        if x.shape[1] != net.config.input_dim:
            raise LabError(LabErrorCode.SHAPE_MISMATCH, f"input width {x.shape[1]} != {net.config.input_dim}")
        return np.zeros((0, net.config.embed_dim))
    embeddings, _ = net.forward(x, train_mode=False)
    return embeddings.data.copy()


def predict_probs(net: Network, samples) -> np.ndarray:
    x = _features(samples)
    if x.shape[0] == 0:
        return np.zeros((0, net.config.num_classes or 0))
    _, probs = net.forward(x, train_mode=False)
    return probs.data.copy()


@dataclass(frozen=True)
class ConfidenceSummary:
    real_mean_max_prob: float
    generated_mean_max_prob: float

    @property
    def gap(self) -> float:
        return self.real_mean_max_prob - self.generated_mean_max_prob


def confidence_summary(net: Network, real, generated) -> ConfidenceSummary:
    """Mean max-class probability on real versus generated samples (eval mode)."""
    real_probs = predict_probs(net, real)
    gen_probs = predict_probs(net, generated)
    return ConfidenceSummary(
        float(real_probs.max(axis=1).mean()) if len(real_probs) else float("nan"),
        float(gen_probs.max(axis=1).mean()) if len(gen_probs) else float("nan"),
    )
