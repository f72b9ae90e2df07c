"""
Seeded generator derivation.

Every stochastic stage draws from a generator derived from ``(seed, stage tag)``
so that stages are independent of each other and of execution order.
"""

from __future__ import annotations

import zlib

import numpy as np


def stage_seed(seed: int, tag: str) -> np.random.SeedSequence:
    # crc32 keeps the tag -> entropy mapping stable across interpreter runs (hash() is salted)
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(tag.encode("utf-8"))])


def stage_rng(seed: int, tag: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(stage_seed(seed, tag)))
