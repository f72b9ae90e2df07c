"""
LSROCKPT embedder checkpoints (little-endian).

    8s magic "LSROCKPT" | u32 version (=1)
    u32 input_dim | u32 n_hidden | n_hidden x u32 | u32 embed_dim | u32 num_classes
    f64 dropout_rate | u8 activation (0 relu, 1 tanh)
    parameters as f64, layer order, weight then bias per layer
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from lsro_core.config import NetworkConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_data.features_io import atomic_write_bytes

from .network import Network, build_network, expected_parameter_count

MAGIC = b"LSROCKPT"
VERSION = 1
ACTIVATION_CODES = {"relu": 0, "tanh": 1}


def _u32(value: int) -> bytes:
    return struct.pack("<I", value)


def encode_checkpoint(net: Network) -> bytes:
    cfg = net.config
    parts = [
        MAGIC,
        _u32(VERSION),
        _u32(int(cfg.input_dim)),
        _u32(len(cfg.hidden_dims)),
        *(_u32(d) for d in cfg.hidden_dims),
        _u32(cfg.embed_dim),
        _u32(int(cfg.num_classes)),
        struct.pack("<dB", cfg.dropout_rate, ACTIVATION_CODES[cfg.activation]),
    ]
    parts.extend(np.ascontiguousarray(p.data, dtype="<f8").tobytes() for p in net.parameters())
    return b"".join(parts)


def save_checkpoint(net: Network, path: str | Path) -> None:
    atomic_write_bytes(path, encode_checkpoint(net))


class PayloadReader:
    def __init__(self, payload: bytes, path: Path):
        self.payload = payload
        self.path = path
        self.offset = 0

    def take(self, fmt: str) -> tuple:
        size = struct.calcsize(fmt)
        if self.offset + size > len(self.payload):
            raise self.error(f"truncated: need {size} more bytes, {len(self.payload) - self.offset} left")
        values = struct.unpack_from(fmt, self.payload, self.offset)
        self.offset += size
        return values

    def error(self, message: str) -> LabError:
        return LabError(
            LabErrorCode.FORMAT_ERROR,
            f"{self.path}: {message} (byte offset {self.offset})",
            details_safe={"path": str(self.path), "offset": self.offset},
        )


def decode_checkpoint(payload: bytes, path: str | Path = "<bytes>", expected_num_classes: int | None = None) -> Network:
    r = PayloadReader(payload, Path(path))
    (magic,) = r.take("<8s")
    if magic != MAGIC:
        r.offset = 0
        raise r.error(f"bad magic {magic!r}, expected {MAGIC!r}")
    (version,) = r.take("<I")
    if version != VERSION:
        raise r.error(f"unsupported checkpoint version {version}, expected {VERSION}")
    input_dim, n_hidden = r.take("<II")
    hidden = list(r.take(f"<{n_hidden}I")) if n_hidden else []
    embed_dim, num_classes = r.take("<II")
    dropout_rate, act_code = r.take("<dB")
    activation = {v: k for k, v in ACTIVATION_CODES.items()}.get(act_code)
    if activation is None:
        raise r.error(f"unknown activation code {act_code}")
    if expected_num_classes is not None and expected_num_classes != num_classes:
        raise LabError(
            LabErrorCode.INVALID_ARGUMENT,
            f"{path}: checkpoint head has {num_classes} classes, requested {expected_num_classes}",
        )
    try:
        config = NetworkConfig(
            input_dim=input_dim,
            hidden_dims=hidden,
            embed_dim=embed_dim,
            num_classes=num_classes,
            dropout_rate=dropout_rate,
            activation=activation,
        )
    except ValueError as e:
        raise r.error(f"invalid network config in checkpoint: {e}") from e

    need = 8 * expected_parameter_count(config)
    if need > len(payload) - r.offset:
        raise r.error(f"truncated parameters: header implies {need} bytes, {len(payload) - r.offset} left")

    # parameters are overwritten below; the generator only fixes shapes
    net = build_network(config, np.random.default_rng(0))
    arrays = []
    for p in net.parameters():
        count = p.data.size
        (raw,) = r.take(f"<{8 * count}s")
        arrays.append(np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(p.shape))
    if r.offset != len(payload):
        raise r.error(f"{len(payload) - r.offset} trailing bytes after parameters")
    net.trunk.load_arrays(arrays[: len(net.trunk.parameters())])
    net.head.load_arrays(arrays[len(net.trunk.parameters()) :])
    return net


def load_checkpoint(path: str | Path, expected_num_classes: int | None = None) -> Network:
    p = Path(path)
    try:
        payload = p.read_bytes()
    except OSError as e:
        raise LabError(LabErrorCode.FORMAT_ERROR, f"cannot read checkpoint {p}: {e}") from e
    return decode_checkpoint(payload, p, expected_num_classes)
