from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from jsonschema import ValidationError, validate

from lsro_core.errors import LabError, LabErrorCode

from .features_io import atomic_write_bytes

ROLES = (
    "train",
    "query",
    "gallery",
    "heldout",
    "outliers",
    "embeddings_query",
    "embeddings_gallery",
)

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["version", "files"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": 1},
        "files": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["path", "role"],
                "additionalProperties": False,
                "properties": {
                    "path": {"type": "string", "minLength": 1},
                    "role": {"enum": list(ROLES)},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    role: str


def write_manifest(path: str | Path, entries: list[ManifestEntry]) -> None:
    doc = {"version": 1, "files": [{"path": e.path, "role": e.role} for e in entries]}
    validate(doc, MANIFEST_SCHEMA)
    atomic_write_bytes(path, (json.dumps(doc, indent=2) + "\n").encode("utf-8"))


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
        validate(doc, MANIFEST_SCHEMA)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise LabError(LabErrorCode.FORMAT_ERROR, f"invalid manifest {p}: {e}") from e
    return [ManifestEntry(f["path"], f["role"]) for f in doc["files"]]


def resolve(manifest_path: str | Path, entries: list[ManifestEntry], role: str) -> Path:
    """Absolute path of the single file with ``role``; paths are relative to the manifest."""
    matches = [e for e in entries if e.role == role]
    if len(matches) != 1:
        raise LabError(
            LabErrorCode.FORMAT_ERROR, f"manifest {manifest_path} has {len(matches)} entries for role {role!r}"
        )
    return Path(manifest_path).parent / matches[0].path
