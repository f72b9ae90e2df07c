"""
Sources of unlabeled outlier samples for training.

Every provider is fitted on the real training split and hands out ``n``
Z=1 rows on request. The experiment config picks one by key.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import ClassVar, Protocol

import numpy as np

from lsro_core.config import GanConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_data.samples import Dataset
from lsro_observability.context import RunContext

from .model import GanModel, generate_outliers, train_gan


class OutlierProvider(Protocol):
    key: ClassVar[str]

    def generate(self, n: int, rng: np.random.Generator) -> Dataset: ...


@dataclass
class ProviderInputs:
    train: Dataset
    heldout: Dataset | None = None
    gan_config: GanConfig | None = None
    gan_model: GanModel | None = None
    ctx: RunContext | None = None


@dataclass
class GanOutlierProvider:
    key: ClassVar[str] = "gan"
    model: GanModel

    @classmethod
    def create(cls, inputs: ProviderInputs) -> GanOutlierProvider:
        if inputs.gan_model is not None:
            return cls(inputs.gan_model)
        if inputs.gan_config is None:
            raise LabError(LabErrorCode.INVALID_ARGUMENT, "gan outliers need a trained model or a gan config")
        return cls(train_gan(inputs.train, inputs.gan_config, inputs.ctx))

    def generate(self, n: int, rng: np.random.Generator) -> Dataset:
        return generate_outliers(self.model, n, rng)


@dataclass
class NoiseGenerator:
    """Uniform samples from the per-coordinate min/max box of the training features."""

    key: ClassVar[str] = "uniform_noise"
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def create(cls, inputs: ProviderInputs) -> NoiseGenerator:
        x = inputs.train.features
        if x.shape[0] == 0:
            raise LabError(LabErrorCode.INVALID_ARGUMENT, "uniform_noise: empty training set")
        return cls(x.min(axis=0), x.max(axis=0))

    def generate(self, n: int, rng: np.random.Generator) -> Dataset:
        if n <= 0:
            return Dataset.empty(self.lo.size)
        return Dataset.unlabeled(rng.uniform(self.lo, self.hi, size=(n, self.lo.size)))


@dataclass
class HeldoutRealProvider:
    """Real images of identities outside train and test, stripped of labels."""

    key: ClassVar[str] = "heldout_real"
    pool: np.ndarray

    @classmethod
    def create(cls, inputs: ProviderInputs) -> HeldoutRealProvider:
        if inputs.heldout is None or len(inputs.heldout) == 0:
            raise LabError(
                LabErrorCode.INVALID_ARGUMENT,
                "heldout_real outliers need a non-empty held-out pool (synth.heldout_identities > 0)",
            )
        return cls(inputs.heldout.features)

    def generate(self, n: int, rng: np.random.Generator) -> Dataset:
        if n <= 0:
            return Dataset.empty(self.pool.shape[1])
        # without replacement while the pool suffices
        replace = n > self.pool.shape[0]
        return Dataset.unlabeled(self.pool[rng.choice(self.pool.shape[0], size=n, replace=replace)])


_PROVIDERS: dict[str, Callable[[ProviderInputs], OutlierProvider]] = {
    cls.key: cls.create for cls in (GanOutlierProvider, NoiseGenerator, HeldoutRealProvider)
}


def provider_keys() -> list[str]:
    return list(_PROVIDERS)


def build_provider(source: str, inputs: ProviderInputs) -> OutlierProvider:
    factory = _PROVIDERS.get(source)
    if factory is None:
        raise LabError(
            LabErrorCode.INVALID_ARGUMENT,
            f"outlier source {source!r} not registered; known: {', '.join(sorted(_PROVIDERS))}",
        )
    return factory(inputs)
