"""
Train / query / gallery split.

Identities are partitioned into disjoint train and test sets. For every test
identity and every camera it appears in, one observation becomes the query and
the rest go to the gallery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lsro_core.errors import LabError, LabErrorCode, invalid
from lsro_observability.logging import get_logger

from .samples import Dataset, Split

logger = get_logger(__name__)


@dataclass
class SplitReport:
    train_identities: list[int]
    test_identities: list[int]
    single_camera_identities: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "train_identities": len(self.train_identities),
            "test_identities": len(self.test_identities),
            "single_camera_identities": self.single_camera_identities,
        }


@dataclass
class SplitResult:
    train: Dataset
    query: Dataset
    gallery: Dataset
    report: SplitReport

    def __iter__(self):
        # allows ``train, query, gallery, report = split_protocol(...)``
        return iter((self.train, self.query, self.gallery, self.report))


def split_protocol(ds: Dataset, train_fraction_of_identities: float, rng: np.random.Generator) -> SplitResult:
    if not 0.0 < train_fraction_of_identities < 1.0:
        raise invalid(f"train fraction must lie in (0, 1), got {train_fraction_of_identities}")
    labeled = ds.subset(np.flatnonzero(ds.labeled_mask))
    cameras = np.unique(labeled.cameras)
    if cameras.size < 2:
        raise LabError(
            LabErrorCode.PROTOCOL_ERROR,
            f"cross-camera retrieval needs at least 2 cameras, dataset has {cameras.size}",
        )
    identities = np.array(labeled.identity_set(), dtype=np.int64)
    if identities.size < 2:
        raise LabError(LabErrorCode.PROTOCOL_ERROR, "need at least 2 identities to split train from test")

    n_train = int(round(train_fraction_of_identities * identities.size))
    n_train = min(max(n_train, 1), identities.size - 1)
    shuffled = rng.permutation(identities)
    train_ids = np.sort(shuffled[:n_train])
    test_ids = np.sort(shuffled[n_train:])

    train_idx = np.flatnonzero(np.isin(labeled.identities, train_ids))
    query_idx: list[int] = []
    gallery_idx: list[int] = []
    single_camera: list[int] = []
    for identity in test_ids:
        rows = np.flatnonzero(labeled.identities == identity)
        seen = np.unique(labeled.cameras[rows])
        if seen.size < 2:
            single_camera.append(int(identity))
        for cam in seen:
            cam_rows = rows[labeled.cameras[rows] == cam]
            pick = int(rng.choice(cam_rows))
            query_idx.append(pick)
            gallery_idx.extend(int(r) for r in cam_rows if r != pick)

    if single_camera:
        logger.warning(
            "test identities seen by a single camera; their queries may have no cross-camera match",
            extra={"data": {"identities": single_camera}},
        )

    report = SplitReport(
        train_identities=[int(i) for i in train_ids],
        test_identities=[int(i) for i in test_ids],
        single_camera_identities=single_camera,
    )
    return SplitResult(
        train=labeled.subset(train_idx).with_split(Split.TRAIN),
        query=labeled.subset(query_idx).with_split(Split.QUERY),
        gallery=labeled.subset(sorted(gallery_idx)).with_split(Split.GALLERY),
        report=report,
    )


def classification_holdout(train: Dataset, fraction: float, rng: np.random.Generator) -> tuple[Dataset, Dataset]:
    """Hold out a per-identity fraction of training samples; every identity keeps one fit sample."""
    if not 0.0 <= fraction < 1.0:
        raise invalid(f"holdout fraction must lie in [0, 1), got {fraction}")
    fit_idx: list[int] = []
    hold_idx: list[int] = []
    for identity in train.identity_set():
        rows = np.flatnonzero(train.identities == identity)
        n_hold = min(int(np.floor(fraction * rows.size)), rows.size - 1)
        held = set(rng.choice(rows, size=n_hold, replace=False).tolist()) if n_hold > 0 else set()
        for r in rows:
            (hold_idx if int(r) in held else fit_idx).append(int(r))
    return train.subset(sorted(fit_idx)), train.subset(sorted(hold_idx))
