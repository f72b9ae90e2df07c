"""
LSROGANM GAN snapshots (little-endian).

    8s magic "LSROGANM" | u32 version (=1)
    u32 latent_dim | u32 data_dim
    u32 n_gen_hidden | n x u32 | u32 n_disc_hidden | n x u32
    data_dim x f64 scaler lo | data_dim x f64 scaler hi
    generator parameters then discriminator parameters, f64, weight then bias per layer

Optimizer state and loss curves are not stored.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from lsro_core.config import GanConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_data.features_io import atomic_write_bytes
from lsro_nets.checkpoint import PayloadReader

from .model import GanModel, build_gan
from .scaling import FeatureScaler

MAGIC = b"LSROGANM"
VERSION = 1


def _f64(values: np.ndarray) -> bytes:
    return np.ascontiguousarray(values, dtype="<f8").tobytes()


def encode_gan(model: GanModel) -> bytes:
    cfg = model.config
    gen_hidden = [layer.fan_out for layer in model.generator.layers[:-1]]
    disc_hidden = [layer.fan_out for layer in model.discriminator.layers[:-1]]
    parts = [
        MAGIC,
        struct.pack("<III", VERSION, cfg.latent_dim, model.data_dim),
        struct.pack(f"<I{len(gen_hidden)}I", len(gen_hidden), *gen_hidden),
        struct.pack(f"<I{len(disc_hidden)}I", len(disc_hidden), *disc_hidden),
        _f64(model.scaler.lo),
        _f64(model.scaler.hi),
    ]
    parts.extend(_f64(p.data) for p in (*model.generator.parameters(), *model.discriminator.parameters()))
    return b"".join(parts)


def save_gan(model: GanModel, path: str | Path) -> None:
    atomic_write_bytes(path, encode_gan(model))


def _floats(r: PayloadReader, count: int) -> np.ndarray:
    (raw,) = r.take(f"<{8 * count}s")
    return np.frombuffer(raw, dtype="<f8").astype(np.float64)


def decode_gan(payload: bytes, path: str | Path = "<bytes>") -> GanModel:
    r = PayloadReader(payload, Path(path))
    (magic,) = r.take("<8s")
    if magic != MAGIC:
        r.offset = 0
        raise r.error(f"bad magic {magic!r}, expected {MAGIC!r}")
    (version,) = r.take("<I")
    if version != VERSION:
        raise r.error(f"unsupported GAN snapshot version {version}, expected {VERSION}")
    latent_dim, data_dim = r.take("<II")
    (n_gen,) = r.take("<I")
    gen_hidden = list(r.take(f"<{n_gen}I")) if n_gen else []
    (n_disc,) = r.take("<I")
    disc_hidden = list(r.take(f"<{n_disc}I")) if n_disc else []
    try:
        cfg = GanConfig(latent_dim=latent_dim, data_dim=data_dim, gen_hidden=gen_hidden, disc_hidden=disc_hidden)
    except ValueError as e:
        raise r.error(f"invalid GAN shape in snapshot: {e}") from e
    scaler = FeatureScaler(_floats(r, data_dim), _floats(r, data_dim))

    model = build_gan(cfg, data_dim, scaler, np.random.default_rng(0))
    for stack in (model.generator, model.discriminator):
        stack.load_arrays([_floats(r, p.data.size).reshape(p.shape) for p in stack.parameters()])
    if r.offset != len(payload):
        raise r.error(f"{len(payload) - r.offset} trailing bytes after parameters")
    return model


def load_gan(path: str | Path) -> GanModel:
    p = Path(path)
    try:
        payload = p.read_bytes()
    except OSError as e:
        raise LabError(LabErrorCode.FORMAT_ERROR, f"cannot read GAN snapshot {p}: {e}") from e
    return decode_gan(payload, p)
