import numpy as np
import pytest

from lsro_core.config import SynthConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_core.rng import stage_rng
from lsro_data.protocol import classification_holdout, split_protocol
from lsro_data.samples import Dataset, Split
from lsro_data.synth import class_histogram, generate_dataset, heldout_pool
from lsro_nets.labels import SourceFlag


def _cfg(**kw):
    base = {"num_identities": 20, "cameras": 2, "samples_per_identity_per_camera": (3, 5), "feature_dim": 8, "heldout_identities": 0}
    return SynthConfig(**{**base, **kw})


def test_sample_count_within_range():
    ds = generate_dataset(_cfg())
    assert 120 <= len(ds) <= 200
    assert (ds.sources == SourceFlag.REAL).all()
    assert ds.identity_set() == list(range(20))


def test_zero_noise_gives_identical_observations():
    ds = generate_dataset(_cfg(noise_sigma=0.0))
    for identity in range(20):
        for cam in range(2):
            rows = ds.features[(ds.identities == identity) & (ds.cameras == cam)]
            assert (rows == rows[0]).all()


def test_same_seed_same_dataset():
    a, b = generate_dataset(_cfg(seed=9)), generate_dataset(_cfg(seed=9))
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.cameras, b.cameras)
    assert not np.array_equal(a.features[:5], generate_dataset(_cfg(seed=10)).features[:5])


def test_fixed_counts_histogram():
    ds = generate_dataset(_cfg(samples_per_identity_per_camera=(4, 4)))
    hist = class_histogram(ds)
    assert set(hist.values()) == {8}
    assert sum(hist.values()) == len(ds)


def test_histogram_skips_unlabeled(rng):
    ds = generate_dataset(_cfg()).concat(Dataset.unlabeled(rng.normal(size=(3, 8))))
    assert sum(class_histogram(ds).values()) == len(ds) - 3


def test_nearest_centroid_separates_identities_without_camera_shift():
    ds = generate_dataset(_cfg(camera_shift_scale=0.0, noise_sigma=0.05, identity_spread=1.0, feature_dim=16))
    centroids = np.stack([ds.features[ds.identities == i].mean(axis=0) for i in range(20)])
    dists = ((ds.features[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assert (dists.argmin(axis=1) == ds.identities).mean() >= 0.99


def test_heldout_pool_is_unlabeled_and_separate():
    cfg = _cfg(heldout_identities=5)
    pool = heldout_pool(cfg)
    assert len(pool) >= 5 * 2 * 3
    assert (pool.identities == -1).all() and (pool.sources == SourceFlag.GENERATED).all()
    assert np.array_equal(generate_dataset(cfg).features, generate_dataset(_cfg()).features)


def test_split_sizes_and_partition():
    ds = generate_dataset(_cfg())
    split = split_protocol(ds, 0.5, stage_rng(0, "split"))
    train, query, gallery, report = split
    assert len(report.train_identities) == len(report.test_identities) == 10
    assert not set(report.train_identities) & set(report.test_identities)
    assert len(query) == 20
    assert len(train) + len(query) + len(gallery) == len(ds)
    assert (query.splits == Split.QUERY).all() and (gallery.splits == Split.GALLERY).all()
    for identity in report.test_identities:
        assert sorted(query.cameras[query.identities == identity].tolist()) == [0, 1]
    assert set(train.identity_set()).isdisjoint(query.identity_set())
    assert set(gallery.identity_set()) <= set(report.test_identities)


def test_single_camera_identity_is_reported():
    n = 8
    ds = Dataset(
        np.arange(2.0 * n).reshape(n, 2),
        [0, 0, 1, 1, 2, 2, 3, 3],
        [0, 1, 0, 1, 0, 0, 0, 1],
        np.zeros(n),
        np.zeros(n),
    )
    split = split_protocol(ds, 0.25, np.random.default_rng(0))
    if 2 in split.report.test_identities:
        assert split.report.single_camera_identities == [2]
    assert len(split.query) == sum(2 if i != 2 else 1 for i in split.report.test_identities)


def test_split_needs_two_cameras():
    ds = generate_dataset(_cfg())
    with pytest.raises(LabError) as exc:
        split_protocol(ds.subset(np.flatnonzero(ds.cameras == 0)), 0.5, np.random.default_rng(0))
    assert exc.value.code is LabErrorCode.PROTOCOL_ERROR


def test_split_rejects_bad_fraction():
    with pytest.raises(LabError):
        split_protocol(generate_dataset(_cfg()), 1.0, np.random.default_rng(0))


def test_classification_holdout_keeps_every_identity():
    train = split_protocol(generate_dataset(_cfg()), 0.5, stage_rng(0, "split")).train
    fit, hold = classification_holdout(train, 0.5, stage_rng(0, "holdout"))
    assert len(fit) + len(hold) == len(train)
    assert fit.identity_set() == train.identity_set()
    assert set(hold.identity_set()) <= set(train.identity_set())
    fit_all, none = classification_holdout(train, 0.0, stage_rng(0, "holdout"))
    assert len(fit_all) == len(train) and len(none) == 0
