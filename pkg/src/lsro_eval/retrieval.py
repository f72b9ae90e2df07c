"""
Re-identification retrieval metrics.

Queries are ranked against the gallery by cosine similarity. Gallery rows of
the query's own identity seen by the query's own camera are dropped from the
ranking. A gallery row is a match when it carries the query identity from
another camera; identity -1 marks a distractor that never matches.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from lsro_core.config.schemas import EvalMode
from lsro_core.errors import LabError, LabErrorCode, invalid
from lsro_data.samples import UNLABELED, Dataset


@dataclass(frozen=True)
class RetrievalMetrics:
    cmc: np.ndarray
    map: float
    per_query_ap: np.ndarray
    num_valid_queries: int
    num_invalid: int = 0
    mode: str = "single"

    def rank(self, k: int) -> float:
        if not 1 <= k <= self.cmc.size:
            raise invalid(f"rank-{k} outside 1..{self.cmc.size}")
        return float(self.cmc[k - 1])

    @property
    def rank1(self) -> float:
        return self.rank(1)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "cmc": [float(v) for v in self.cmc],
            "map": self.map,
            "num_valid_queries": self.num_valid_queries,
            "num_invalid": self.num_invalid,
        }


@dataclass(frozen=True)
class RankedGallery:
    order: np.ndarray  # gallery indices, best first, excluded rows absent
    excluded: np.ndarray  # bool mask over the full gallery
    relevant: np.ndarray  # aligned with order

    @property
    def empty(self) -> bool:
        return self.order.size == 0


def _unit_rows(x: np.ndarray, what: str) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise LabError(
            LabErrorCode.DOMAIN_ERROR,
            f"{what}: {zero.size} zero embedding(s), first at row {int(zero[0])}; cosine similarity is undefined",
            details_safe={"rows": zero[:10].tolist()},
        )
    return x / norms[:, None]


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.size != b.size:
        raise LabError(LabErrorCode.SHAPE_MISMATCH, f"cosine_similarity: widths {a.size} and {b.size}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise LabError(LabErrorCode.DOMAIN_ERROR, "cosine_similarity: zero vector")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def cosine_matrix(queries: np.ndarray, gallery: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarity, queries x gallery."""
    if queries.shape[1] != gallery.shape[1]:
        raise LabError(
            LabErrorCode.SHAPE_MISMATCH,
            f"query width {queries.shape[1]} != gallery width {gallery.shape[1]}",
        )
    return np.clip(_unit_rows(queries, "queries") @ _unit_rows(gallery, "gallery").T, -1.0, 1.0)


def rank_gallery(
    similarities: np.ndarray,
    query_identity: int,
    query_camera: int,
    gallery_identities: np.ndarray,
    gallery_cameras: np.ndarray,
) -> RankedGallery:
    """Order one query's gallery by descending similarity; ties go to the lower gallery index."""
    same_id = gallery_identities == query_identity
    excluded = same_id & (gallery_cameras == query_camera)
    kept = np.flatnonzero(~excluded)
    order = kept[np.argsort(-similarities[kept], kind="stable")]
    relevant = same_id[order] & (gallery_identities[order] != UNLABELED)
    return RankedGallery(order=order, excluded=excluded, relevant=relevant)


def average_precision(relevant: Sequence[bool] | np.ndarray) -> float:
    """(1/R) * sum of precision@r over the positions r of the R relevant items."""
    flags = np.asarray(relevant, dtype=bool)
    hits = np.flatnonzero(flags)
    if hits.size == 0:
        raise LabError(LabErrorCode.PROTOCOL_ERROR, "average_precision: no relevant item in the ranking")
    precision_at_hits = np.arange(1, hits.size + 1) / (hits + 1)
    return float(precision_at_hits.mean())


def cmc_curve(rankings: Sequence[np.ndarray], k_max: int) -> np.ndarray:
    """Fraction of rankings whose first relevant item sits at position <= k, k = 1..k_max."""
    if k_max < 1:
        raise invalid(f"k_max must be >= 1, got {k_max}")
    curve = np.zeros(k_max)
    if not rankings:
        return curve
    for flags in rankings:
        hits = np.flatnonzero(np.asarray(flags, dtype=bool))
        if hits.size and hits[0] < k_max:
            curve[hits[0] :] += 1
    return curve / len(rankings)


def pool_queries(queries: Dataset) -> Dataset:
    """Mean embedding per (identity, camera), groups in ascending key order."""
    keys = np.stack([queries.identities, queries.cameras], axis=1)
    groups, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    pooled = np.zeros((groups.shape[0], queries.dim))
    np.add.at(pooled, inverse, queries.features)
    pooled /= np.bincount(inverse, minlength=groups.shape[0])[:, None]
    first = np.array([np.flatnonzero(inverse == g)[0] for g in range(groups.shape[0])], dtype=np.int64)
    return queries.subset(first).with_features(pooled)


def evaluate(queries: Dataset, gallery: Dataset, mode: EvalMode = "single", k_max: int = 20) -> RetrievalMetrics:
    """
    Rank every query (or pooled query in multi mode) against the gallery.

    ``features`` of both sets hold embeddings. Queries without any cross-camera
    match are left out of CMC and mAP and counted in ``num_invalid``.
    """
    if mode not in ("single", "multi"):
        raise invalid(f"unknown evaluation mode {mode!r}")
    if len(queries) == 0 or len(gallery) == 0:
        raise LabError(LabErrorCode.PROTOCOL_ERROR, "evaluate: empty query or gallery set")
    if mode == "multi":
        queries = pool_queries(queries)

    sims = cosine_matrix(queries.features, gallery.features)
    rankings: list[np.ndarray] = []
    aps: list[float] = []
    # ordered reduction by query index
    for i in range(len(queries)):
        ranked = rank_gallery(
            sims[i], int(queries.identities[i]), int(queries.cameras[i]), gallery.identities, gallery.cameras
        )
        if ranked.empty or not ranked.relevant.any():
            continue
        rankings.append(ranked.relevant)
        aps.append(average_precision(ranked.relevant))

    if not aps:
        raise LabError(
            LabErrorCode.PROTOCOL_ERROR,
            f"evaluate: none of {len(queries)} queries has a cross-camera match in the gallery",
        )
    per_query = np.asarray(aps)
    return RetrievalMetrics(
        cmc=cmc_curve(rankings, k_max),
        map=float(per_query.mean()),
        per_query_ap=per_query,
        num_valid_queries=len(aps),
        num_invalid=len(queries) - len(aps),
        mode=mode,
    )
