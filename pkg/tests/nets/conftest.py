import numpy as np
import pytest

from lsro_data.samples import Dataset, Split
from lsro_nets.labels import SourceFlag


def _clusters(rng, per_class=20, dim=4, classes=2, spread=3.0, noise=0.3):
    feats = np.vstack([spread * np.eye(dim)[k] + noise * rng.normal(size=(per_class, dim)) for k in range(classes)])
    ids = np.repeat(np.arange(classes), per_class)
    n = ids.size
    return Dataset(feats, ids, np.arange(n) % 2, np.full(n, Split.TRAIN), np.full(n, SourceFlag.REAL))


@pytest.fixture
def toy_clusters():
    """Factory for well separated labeled clusters, one per coordinate axis."""
    return _clusters
