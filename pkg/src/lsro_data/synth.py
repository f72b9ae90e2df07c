"""
Synthetic re-identification datasets.

Identities are Gaussian centers; each camera applies one fixed affine map to
every identity it sees (the viewpoint shift), and each observation adds
isotropic Gaussian noise. Per-identity counts are small on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lsro_core.config import SynthConfig
from lsro_core.rng import stage_rng
from lsro_nets.labels import SourceFlag

from .samples import UNLABELED, Dataset, Split


@dataclass(frozen=True)
class CameraTransform:
    matrix: np.ndarray
    bias: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        return x @ self.matrix.T + self.bias


def _camera_transforms(cfg: SynthConfig, rng: np.random.Generator) -> list[CameraTransform]:
    d = cfg.feature_dim
    s = cfg.camera_shift_scale
    transforms = []
    for _ in range(cfg.cameras):
        mixing = np.eye(d) + s * rng.normal(size=(d, d)) / np.sqrt(d)
        transforms.append(CameraTransform(mixing, s * rng.normal(size=d)))
    return transforms


def _observe(
    cfg: SynthConfig,
    rng: np.random.Generator,
    transforms: list[CameraTransform],
    first_identity: int,
    count: int,
) -> Dataset:
    lo, hi = cfg.samples_per_identity_per_camera
    centers = rng.normal(0.0, cfg.identity_spread, size=(count, cfg.feature_dim))
    feats, ids, cams = [], [], []
    for offset, center in enumerate(centers):
        for cam, transform in enumerate(transforms):
            n = int(rng.integers(lo, hi + 1))
            if n == 0:
                continue
            clean = transform.apply(center[None, :])
            feats.append(np.repeat(clean, n, axis=0) + cfg.noise_sigma * rng.normal(size=(n, cfg.feature_dim)))
            ids.extend([first_identity + offset] * n)
            cams.extend([cam] * n)
    if not feats:
        return Dataset.empty(cfg.feature_dim)
    n_total = len(ids)
    return Dataset(
        np.vstack(feats),
        ids,
        cams,
        np.full(n_total, Split.TRAIN),
        np.full(n_total, SourceFlag.REAL),
    )


def _synthesize(cfg: SynthConfig) -> tuple[Dataset, Dataset]:
    rng = stage_rng(cfg.seed, "synth")
    transforms = _camera_transforms(cfg, rng)
    main = _observe(cfg, rng, transforms, 0, cfg.num_identities)
    extra = _observe(cfg, rng, transforms, cfg.num_identities, cfg.heldout_identities)
    return main, extra


def generate_dataset(cfg: SynthConfig) -> Dataset:
    return _synthesize(cfg)[0]


def heldout_pool(cfg: SynthConfig) -> Dataset:
    """
    Real observations of identities that never enter the split, returned as
    unlabeled outliers (identity and camera dropped, Z=1).
    """
    extra = _synthesize(cfg)[1]
    return Dataset(
        extra.features,
        np.full(len(extra), UNLABELED),
        np.full(len(extra), UNLABELED),
        np.full(len(extra), Split.TRAIN),
        np.full(len(extra), SourceFlag.GENERATED),
    )


def class_histogram(ds: Dataset) -> dict[int, int]:
    ids, counts = np.unique(ds.identities[ds.labeled_mask], return_counts=True)
    return {int(i): int(c) for i, c in zip(ids, counts, strict=True)}
