"""
LSROFEAT binary feature files (little-endian throughout).

    header:  8s magic "LSROFEAT" | u32 version (=1) | u64 N | u32 D      (24 bytes)
    record:  i32 identity | i32 camera | u8 split | u8 source Z | D x f64
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from lsro_core.errors import LabError, LabErrorCode

from .samples import Dataset

MAGIC = b"LSROFEAT"
VERSION = 1
HEADER = struct.Struct("<8sIQI")
HEADER_SIZE = HEADER.size  # 24


RECORD_PREFIX = 4 + 4 + 1 + 1


def record_size(dim: int) -> int:
    return RECORD_PREFIX + 8 * dim


def record_dtype(dim: int) -> np.dtype:
    return np.dtype(
        [
            ("identity", "<i4"),
            ("camera", "<i4"),
            ("split", "u1"),
            ("source", "u1"),
            ("features", "<f8", (dim,)),
        ]
    )


def _format_error(path: Path, message: str, offset: int, **details) -> LabError:
    return LabError(
        LabErrorCode.FORMAT_ERROR,
        f"{path}: {message} (byte offset {offset})",
        details_safe={"path": str(path), "offset": offset, **details},
    )


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def encode_features(samples: Dataset) -> bytes:
    dim = samples.dim
    records = np.zeros(len(samples), dtype=record_dtype(dim))
    records["identity"] = samples.identities
    records["camera"] = samples.cameras
    records["split"] = samples.splits
    records["source"] = samples.sources
    if len(samples):
        records["features"] = samples.features
    return HEADER.pack(MAGIC, VERSION, len(samples), dim) + records.tobytes()


def write_features(path: str | Path, samples: Dataset) -> None:
    atomic_write_bytes(path, encode_features(samples))


def decode_features(payload: bytes, path: str | Path = "<bytes>") -> Dataset:
    path = Path(path)
    if len(payload) < HEADER_SIZE:
        raise _format_error(
            path,
            f"truncated header: expected {HEADER_SIZE} bytes, got {len(payload)}",
            len(payload),
            expected=HEADER_SIZE,
            actual=len(payload),
        )
    magic, version, n, dim = HEADER.unpack_from(payload, 0)
    if magic != MAGIC:
        raise _format_error(path, f"bad magic {magic!r}, expected {MAGIC!r}", 0)
    if version != VERSION:
        raise _format_error(path, f"unsupported version {version}, expected {VERSION}", 8)
    width = record_size(dim)
    expected = HEADER_SIZE + n * width
    if len(payload) != expected:
        complete = (len(payload) - HEADER_SIZE) // width if len(payload) > HEADER_SIZE else 0
        raise _format_error(
            path,
            f"length mismatch: expected {expected} bytes for {n} records of width {dim}, got {len(payload)}",
            HEADER_SIZE + min(complete, n) * width,
            expected=expected,
            actual=len(payload),
        )
    if n == 0:
        return Dataset.empty(dim)
    dtype = record_dtype(dim)
    records = np.frombuffer(payload, dtype=dtype, count=n, offset=HEADER_SIZE)
    bad_split = np.flatnonzero(records["split"] > 2)
    bad_source = np.flatnonzero(records["source"] > 1)
    if bad_split.size or bad_source.size:
        row = int(min(np.concatenate([bad_split, bad_source])))
        raise _format_error(path, f"record {row} has an invalid split/source code", HEADER_SIZE + row * dtype.itemsize)
    try:
        return Dataset(
            np.array(records["features"], dtype=np.float64).reshape(n, dim),
            records["identity"].astype(np.int64),
            records["camera"].astype(np.int64),
            records["split"].copy(),
            records["source"].copy(),
        )
    except LabError as e:
        raise _format_error(path, f"inconsistent records: {e.message_safe}", HEADER_SIZE) from e


def read_features(path: str | Path) -> Dataset:
    p = Path(path)
    try:
        payload = p.read_bytes()
    except OSError as e:
        raise LabError(LabErrorCode.FORMAT_ERROR, f"cannot read feature file {p}: {e}") from e
    return decode_features(payload, p)
