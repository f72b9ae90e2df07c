"""
Feedforward GAN on feature vectors.

The generator maps latent vectors uniform on [-1, 1]^latent_dim through ReLU
layers to a tanh output in the scaled feature box. The discriminator emits two
logits whose softmax gives P(real) in its second column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lsro_core.autodiff import Tensor, softmax_rows, zero_grads
from lsro_core.config import GanConfig
from lsro_core.errors import LabError, LabErrorCode, invalid
from lsro_core.rng import stage_rng
from lsro_data.samples import Dataset
from lsro_nets.labels import one_hot_rows
from lsro_nets.layers import DenseStack
from lsro_nets.losses import batch_cross_entropy
from lsro_nets.optim import AdamState, adam_step
from lsro_observability.context import RunContext
from lsro_observability.logging import get_logger
from lsro_observability.metrics import metrics

from .scaling import FeatureScaler

FAKE, REAL = 0, 1


@dataclass
class GanModel:
    config: GanConfig
    generator: DenseStack
    discriminator: DenseStack
    scaler: FeatureScaler
    gen_state: AdamState
    disc_state: AdamState
    d_losses: list[float] = field(default_factory=list)
    g_losses: list[float] = field(default_factory=list)

    @property
    def latent_dim(self) -> int:
        return self.generator.input_dim

    @property
    def data_dim(self) -> int:
        return self.generator.output_dim

    def generate_scaled(self, latent: np.ndarray) -> np.ndarray:
        return self.generator(Tensor(latent)).data.copy()

    def real_probability(self, scaled: np.ndarray) -> np.ndarray:
        return softmax_rows(self.discriminator(Tensor(scaled))).data[:, REAL].copy()


def sample_latent(rng: np.random.Generator, n: int, latent_dim: int) -> np.ndarray:
    """n x latent_dim, entries i.i.d. uniform on [-1, 1]."""
    if n < 1:
        raise invalid(f"sample_latent: n must be >= 1, got {n}")
    return rng.uniform(-1.0, 1.0, size=(n, latent_dim))


def build_gan(cfg: GanConfig, data_dim: int, scaler: FeatureScaler, rng: np.random.Generator) -> GanModel:
    gen_dims = [cfg.latent_dim, *cfg.gen_hidden, data_dim]
    disc_dims = [data_dim, *cfg.disc_hidden, 2]
    generator = DenseStack.build(gen_dims, ["relu"] * len(cfg.gen_hidden) + ["tanh"], rng)
    discriminator = DenseStack.build(disc_dims, ["relu"] * len(cfg.disc_hidden) + [None], rng)
    return GanModel(
        config=cfg,
        generator=generator,
        discriminator=discriminator,
        scaler=scaler,
        gen_state=AdamState.for_params(generator.parameters()),
        disc_state=AdamState.for_params(discriminator.parameters()),
    )


def _features(real_data) -> np.ndarray:
    return np.asarray(real_data.features if isinstance(real_data, Dataset) else real_data, dtype=np.float64)


def train_gan(real_data, cfg: GanConfig, ctx: RunContext | None = None) -> GanModel:
    """
    Alternate one discriminator step (real -> 1, fake -> 0) with one
    non-saturating generator step (fake -> 1) per mini-batch, Adam on both.
    """
    log = get_logger(__name__, ctx)
    x = _features(real_data)
    if x.ndim != 2 or x.shape[0] == 0:
        raise LabError(LabErrorCode.INVALID_ARGUMENT, "train_gan: no real samples to learn from")
    if cfg.data_dim is not None and cfg.data_dim != x.shape[1]:
        raise LabError(LabErrorCode.SHAPE_MISMATCH, f"train_gan: data width {x.shape[1]} != data_dim {cfg.data_dim}")

    scaler = FeatureScaler.fit(x)
    scaled = scaler.transform(x)
    rng = stage_rng(cfg.seed, "gan")
    model = build_gan(cfg, x.shape[1], scaler, rng)
    g_params = model.generator.parameters()
    d_params = model.discriminator.parameters()

    for epoch in range(cfg.epochs):
        order = rng.permutation(scaled.shape[0])
        d_total = g_total = 0.0
        for start in range(0, order.size, cfg.batch_size):
            batch = scaled[order[start : start + cfg.batch_size]]
            m = batch.shape[0]
            real_t = one_hot_rows(np.full(m, REAL), 2)
            fake_t = one_hot_rows(np.full(m, FAKE), 2)
            ones = np.ones(m)

            fake = model.generate_scaled(sample_latent(rng, m, cfg.latent_dim))
            d_loss = batch_cross_entropy(softmax_rows(model.discriminator(Tensor(batch))), real_t, ones) + (
                batch_cross_entropy(softmax_rows(model.discriminator(Tensor(fake))), fake_t, ones)
            )
            d_loss.backward()
            adam_step(d_params, model.disc_state, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)

            generated = model.generator(Tensor(sample_latent(rng, m, cfg.latent_dim)))
            g_loss = batch_cross_entropy(softmax_rows(model.discriminator(generated)), real_t, ones)
            g_loss.backward()
            zero_grads(d_params)
            adam_step(g_params, model.gen_state, cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)

            d_total += d_loss.item() * m
            g_total += g_loss.item() * m
        model.d_losses.append(d_total / order.size)
        model.g_losses.append(g_total / order.size)
        metrics.train_epochs_total.labels(loop="gan").inc()
        losses = {"d_loss": model.d_losses[-1], "g_loss": model.g_losses[-1]}
        log.debug("gan epoch finished", extra={"data": {"epoch": epoch, **losses}})

    log.info(
        "gan trained",
        extra={"data": {"epochs": cfg.epochs, "samples": int(x.shape[0]), **losses}},
    )
    return model


def generate_outliers(model: GanModel, n: int, rng: np.random.Generator) -> Dataset:
    """n unlabeled (Z=1) samples mapped back to the embedder's feature scale."""
    if n <= 0:
        return Dataset.empty(model.data_dim)
    scaled = model.generate_scaled(sample_latent(rng, n, model.latent_dim))
    return Dataset.unlabeled(model.scaler.inverse(scaled))


def discriminator_accuracy(model: GanModel, real_features: np.ndarray, generated_features: np.ndarray) -> float:
    """Fraction of real rows scored P(real) > 0.5 and generated rows scored <= 0.5."""
    real_p = model.real_probability(model.scaler.transform(np.asarray(real_features)))
    gen_p = model.real_probability(model.scaler.transform(np.asarray(generated_features)))
    correct = int((real_p > 0.5).sum()) + int((gen_p <= 0.5).sum())
    return correct / (real_p.size + gen_p.size)
