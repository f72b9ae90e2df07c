from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from lsro_core.errors import LabError, LabErrorCode, invalid
from lsro_nets.labels import SourceFlag

UNLABELED = -1


class Split(IntEnum):
    TRAIN = 0
    QUERY = 1
    GALLERY = 2


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    identity: int = UNLABELED
    camera: int = UNLABELED
    split: Split = Split.TRAIN
    source: SourceFlag = SourceFlag.REAL

    def __post_init__(self) -> None:
        if (self.identity >= 0) != (self.source is SourceFlag.REAL):
            raise invalid(
                f"sample identity {self.identity} inconsistent with source Z={int(self.source)}",
                identity=self.identity,
            )
        if self.split is not Split.TRAIN and self.camera < 0:
            raise invalid(f"{self.split.name.lower()} sample needs a camera, got {self.camera}")


@dataclass
class Dataset:
    """Column-oriented sample set: one row per sample."""

    features: np.ndarray
    identities: np.ndarray
    cameras: np.ndarray
    splits: np.ndarray
    sources: np.ndarray

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise LabError(LabErrorCode.SHAPE_MISMATCH, f"features must be N x D, got shape {self.features.shape}")
        n = self.features.shape[0]
        self.identities = np.asarray(self.identities, dtype=np.int64).reshape(-1)
        self.cameras = np.asarray(self.cameras, dtype=np.int64).reshape(-1)
        self.splits = np.asarray(self.splits, dtype=np.uint8).reshape(-1)
        self.sources = np.asarray(self.sources, dtype=np.uint8).reshape(-1)
        for name in ("identities", "cameras", "splits", "sources"):
            if getattr(self, name).shape[0] != n:
                raise LabError(
                    LabErrorCode.SHAPE_MISMATCH,
                    f"{name} has {getattr(self, name).shape[0]} entries for {n} feature rows",
                )
        if np.any((self.identities >= 0) != (self.sources == SourceFlag.REAL)):
            raise invalid("identity >= 0 must hold exactly for real (Z=0) samples")

    @classmethod
    def empty(cls, dim: int) -> Dataset:
        return cls(np.zeros((0, dim)), [], [], [], [])

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], dim: int | None = None) -> Dataset:
        if not samples:
            if dim is None:
                raise invalid("an empty sample list needs an explicit feature dimension")
            return cls.empty(dim)
        return cls(
            np.stack([np.asarray(s.features, dtype=np.float64) for s in samples]),
            [s.identity for s in samples],
            [s.camera for s in samples],
            [int(s.split) for s in samples],
            [int(s.source) for s in samples],
        )

    @classmethod
    def unlabeled(cls, features: np.ndarray) -> Dataset:
        """Generated / outlier rows: Z=1, no identity, no camera."""
        features = np.asarray(features, dtype=np.float64)
        n = features.shape[0]
        return cls(
            features,
            np.full(n, UNLABELED),
            np.full(n, UNLABELED),
            np.full(n, Split.TRAIN),
            np.full(n, SourceFlag.GENERATED),
        )

    def __len__(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def labeled_mask(self) -> np.ndarray:
        return self.sources == SourceFlag.REAL

    def sample(self, i: int) -> Sample:
        return Sample(
            features=self.features[i].copy(),
            identity=int(self.identities[i]),
            camera=int(self.cameras[i]),
            split=Split(int(self.splits[i])),
            source=SourceFlag(int(self.sources[i])),
        )

    def __iter__(self) -> Iterator[Sample]:
        for i in range(len(self)):
            yield self.sample(i)

    def subset(self, index: np.ndarray | Sequence[int]) -> Dataset:
        idx = np.asarray(index, dtype=np.int64)
        return Dataset(
            self.features[idx],
            self.identities[idx],
            self.cameras[idx],
            self.splits[idx],
            self.sources[idx],
        )

    def with_split(self, split: Split) -> Dataset:
        return Dataset(self.features, self.identities, self.cameras, np.full(len(self), split), self.sources)

    def with_features(self, features: np.ndarray) -> Dataset:
        """Same bookkeeping columns, new feature matrix (e.g. embeddings)."""
        return Dataset(features, self.identities, self.cameras, self.splits, self.sources)

    def concat(self, other: Dataset) -> Dataset:
        if len(self) and len(other) and self.dim != other.dim:
            raise LabError(LabErrorCode.SHAPE_MISMATCH, f"cannot concatenate widths {self.dim} and {other.dim}")
        return Dataset(
            _stack(self.features, other.features),
            np.concatenate([self.identities, other.identities]),
            np.concatenate([self.cameras, other.cameras]),
            np.concatenate([self.splits, other.splits]),
            np.concatenate([self.sources, other.sources]),
        )

    def identity_set(self) -> list[int]:
        return sorted(int(i) for i in np.unique(self.identities[self.labeled_mask]))


def _stack(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not len(a):
        return b
    if not len(b):
        return a
    return np.vstack([a, b])
