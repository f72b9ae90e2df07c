"""
Configuration schemas.

Every experiment knob is a field of one of these pydantic models; invariants
from the model descriptions are enforced as validators so that a bad config
fails before any stage runs.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Strategy = Literal["baseline", "lsro", "all_in_one", "pseudo_label"]
OutlierSource = Literal["gan", "heldout_real", "uniform_noise"]
Activation = Literal["relu", "tanh"]
EvalMode = Literal["single", "multi"]

STRATEGIES: tuple[str, ...] = ("baseline", "lsro", "all_in_one", "pseudo_label")


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SynthConfig(StrictModel):
    num_identities: int = Field(100, ge=2)
    cameras: int = Field(2, ge=2)
    samples_per_identity_per_camera: tuple[int, int] = (3, 8)
    feature_dim: int = Field(32, ge=1)
    identity_spread: float = Field(1.0, ge=0)
    camera_shift_scale: float = Field(0.5, ge=0)
    noise_sigma: float = Field(0.7, ge=0)
    heldout_identities: int = Field(50, ge=0)
    train_fraction: float = Field(0.5, gt=0, lt=1)
    seed: int = Field(0, ge=0)

    @field_validator("samples_per_identity_per_camera")
    @classmethod
    def _range(cls, v: tuple[int, int]) -> tuple[int, int]:
        lo, hi = v
        if lo < 0 or hi < 1 or lo > hi:
            raise ValueError(f"samples_per_identity_per_camera must satisfy 0 <= min <= max, max >= 1; got {v}")
        return v


class GanConfig(StrictModel):
    latent_dim: int = Field(100, ge=1)
    data_dim: int | None = Field(None, ge=1)
    gen_hidden: list[int] = Field(default_factory=lambda: [64, 64])
    disc_hidden: list[int] = Field(default_factory=lambda: [64])
    adam_beta1: float = Field(0.5, gt=0, lt=1)
    adam_beta2: float = Field(0.99, gt=0, lt=1)
    adam_eps: float = Field(1e-8, gt=0)
    lr: float = Field(0.0002, gt=0)
    epochs: int = Field(30, ge=1)
    batch_size: int = Field(32, ge=1)
    seed: int = Field(0, ge=0)

    @field_validator("gen_hidden", "disc_hidden")
    @classmethod
    def _positive(cls, v: list[int]) -> list[int]:
        if any(d < 1 for d in v):
            raise ValueError(f"hidden widths must be positive, got {v}")
        return v


class NetworkConfig(StrictModel):
    input_dim: int | None = Field(None, ge=1)
    hidden_dims: list[int] = Field(default_factory=lambda: [64])
    embed_dim: int = Field(32, ge=1)
    num_classes: int | None = Field(None, ge=2)
    dropout_rate: float = Field(0.5, ge=0, lt=1)
    activation: Activation = "relu"

    @field_validator("hidden_dims")
    @classmethod
    def _positive(cls, v: list[int]) -> list[int]:
        if any(d < 1 for d in v):
            raise ValueError(f"hidden_dims must be positive, got {v}")
        return v

    @property
    def resolved(self) -> bool:
        return self.input_dim is not None and self.num_classes is not None


class TrainConfig(StrictModel):
    strategy: Strategy = "baseline"
    epochs: int = Field(50, ge=1)
    batch_size: int = Field(32, ge=1)
    lr_initial: float = Field(0.002, gt=0)
    lr_after_decay: float = Field(0.0002, gt=0)
    decay_epoch: int = Field(40, ge=0)
    momentum: float = Field(0.9, ge=0, lt=1)
    seed: int = Field(0, ge=0)
    pseudo_warmup_epochs: int = Field(20, ge=0)
    pseudo_weight: float = Field(0.1, ge=0)
    lsr_epsilon: float = Field(0.0, ge=0, le=1)

    @model_validator(mode="after")
    def _schedule(self) -> TrainConfig:
        if self.lr_after_decay > self.lr_initial:
            raise ValueError("lr_after_decay must not exceed lr_initial")
        if self.decay_epoch > self.epochs:
            raise ValueError("decay_epoch must not exceed epochs")
        return self


class EvalConfig(StrictModel):
    mode: EvalMode = "single"
    k_max: int = Field(20, ge=1)
    classification_holdout: float = Field(0.0, ge=0, lt=1)


class ExperimentConfig(StrictModel):
    synth: SynthConfig = Field(default_factory=SynthConfig)
    gan: GanConfig = Field(default_factory=GanConfig)
    net: NetworkConfig = Field(default_factory=NetworkConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    strategies: list[Strategy] = Field(default_factory=lambda: list(STRATEGIES))
    generated_counts: list[int] | None = None
    generated_multiples: list[int] = Field(default_factory=lambda: [0, 1, 2, 3])
    repeats: int = Field(5, ge=1)
    outlier_source: OutlierSource = "gan"
    output_dir: str = "results"
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _grid(self) -> ExperimentConfig:
        if self.generated_counts is not None:
            if 0 not in self.generated_counts:
                raise ValueError("generated_counts must include 0 (the baseline cell)")
            if any(c < 0 for c in self.generated_counts):
                raise ValueError("generated_counts must be non-negative")
        if 0 not in self.generated_multiples or any(m < 0 for m in self.generated_multiples):
            raise ValueError("generated_multiples must be non-negative and include 0")
        return self

    def counts_for(self, num_real_train: int) -> list[int]:
        """Generated-sample grid, ascending; multiples of the real set unless given explicitly."""
        if self.generated_counts is not None:
            return sorted(set(self.generated_counts))
        return sorted({m * num_real_train for m in self.generated_multiples})
