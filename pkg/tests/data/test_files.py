import json
import struct

import numpy as np
import pytest

from lsro_core.errors import LabError, LabErrorCode
from lsro_data.features_io import (
    HEADER,
    HEADER_SIZE,
    MAGIC,
    decode_features,
    encode_features,
    read_features,
    record_dtype,
    record_size,
    write_features,
)
from lsro_data.manifest import ManifestEntry, read_manifest, resolve, write_manifest
from lsro_data.samples import Dataset, Sample, Split
from lsro_nets.labels import SourceFlag


@pytest.fixture
def mixed(rng):
    labeled = Dataset(rng.normal(size=(4, 3)), [5, 5, 9, 2], [0, 1, 1, 0], [1, 2, 2, 0], [0, 0, 0, 0])
    return labeled.concat(Dataset.unlabeled(rng.normal(size=(2, 3))))


def test_round_trip_is_bit_exact(tmp_path, mixed):
    path = tmp_path / "x.lsrofeat"
    write_features(path, mixed)
    back = read_features(path)
    assert back.features.tobytes() == mixed.features.tobytes()
    for name in ("identities", "cameras", "splits", "sources"):
        assert np.array_equal(getattr(back, name), getattr(mixed, name))
    assert path.stat().st_size == HEADER_SIZE + len(mixed) * (4 + 4 + 1 + 1 + 3 * 8)


def test_empty_file_is_header_only(tmp_path):
    path = tmp_path / "empty.lsrofeat"
    write_features(path, Dataset.empty(7))
    assert path.stat().st_size == 24
    back = read_features(path)
    assert len(back) == 0 and back.dim == 7


def test_truncated_payload_names_lengths(mixed):
    payload = encode_features(mixed)
    with pytest.raises(LabError) as exc:
        decode_features(payload[:-5])
    assert exc.value.code is LabErrorCode.FORMAT_ERROR
    assert str(len(payload)) in exc.value.message_safe
    assert str(len(payload) - 5) in exc.value.message_safe


@pytest.mark.parametrize(
    ("mangle", "offset"),
    [
        (lambda b: b"LSROFEAX" + b[8:], 0),
        (lambda b: b[:8] + struct.pack("<I", 3) + b[12:], 8),
        (lambda b: b[:10], 10),
    ],
    ids=["magic", "version", "short-header"],
)
def test_header_errors_carry_offset(mixed, mangle, offset):
    with pytest.raises(LabError) as exc:
        decode_features(mangle(encode_features(mixed)))
    assert exc.value.details_safe["offset"] == offset


def test_invalid_split_code(mixed):
    payload = bytearray(encode_features(mixed))
    payload[HEADER_SIZE + 8] = 7
    with pytest.raises(LabError) as exc:
        decode_features(bytes(payload))
    assert "split" in exc.value.message_safe


@pytest.mark.parametrize("dim", [1, 3, 64])
def test_record_size_matches_packed_dtype(dim):
    assert record_size(dim) == record_dtype(dim).itemsize


@pytest.mark.parametrize("n", [1, 2**40])
def test_huge_width_in_header_is_a_format_error(n):
    payload = HEADER.pack(MAGIC, 1, n, 2**31) + bytes(100)
    with pytest.raises(LabError) as exc:
        decode_features(payload)
    assert exc.value.code is LabErrorCode.FORMAT_ERROR
    assert "length mismatch" in exc.value.message_safe
    assert exc.value.details_safe["offset"] == HEADER_SIZE


def test_missing_file(tmp_path):
    with pytest.raises(LabError):
        read_features(tmp_path / "none.lsrofeat")


def test_sample_invariants(rng):
    with pytest.raises(LabError):
        Sample(rng.normal(size=3), identity=-1, source=SourceFlag.REAL)
    with pytest.raises(LabError):
        Sample(rng.normal(size=3), identity=4, camera=-1, split=Split.QUERY)
    ds = Dataset.from_samples([Sample(np.ones(3), identity=1, camera=0)])
    assert ds.sample(0).identity == 1


def test_manifest_round_trip(tmp_path):
    path = tmp_path / "run" / "manifest.json"
    entries = [ManifestEntry("train.lsrofeat", "train"), ManifestEntry("query.lsrofeat", "query")]
    write_manifest(path, entries)
    assert read_manifest(path) == entries
    assert resolve(path, entries, "query") == tmp_path / "run" / "query.lsrofeat"
    with pytest.raises(LabError):
        resolve(path, entries, "gallery")


@pytest.mark.parametrize(
    "doc",
    [
        {"version": 2, "files": []},
        {"version": 1, "files": [{"path": "a", "role": "weights"}]},
        {"version": 1},
    ],
)
def test_manifest_rejects_bad_documents(tmp_path, doc):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(LabError) as exc:
        read_manifest(path)
    assert exc.value.code is LabErrorCode.FORMAT_ERROR
