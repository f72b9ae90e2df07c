from __future__ import annotations

import json
import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from dotenv import dotenv_values
from pydantic import ValidationError

from lsro_core.errors import LabError, LabErrorCode

from .schemas import ExperimentConfig

SECTIONS = ("synth", "gan", "net", "train", "eval")
TOP_LEVEL_SECTION = "experiment"
ENV_PREFIX = "LSRO__"


def _parse_value(raw: str) -> Any:
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _place(tree: dict[str, Any], dotted: str, value: Any, *, origin: str) -> None:
    parts = [p for p in dotted.strip().split(".") if p]
    if len(parts) == 2 and parts[0] == TOP_LEVEL_SECTION:
        tree[parts[1]] = value
    elif len(parts) == 2 and parts[0] in SECTIONS:
        tree.setdefault(parts[0], {})[parts[1]] = value
    elif len(parts) == 1 and parts[0] not in SECTIONS:
        tree[parts[0]] = value
    else:
        raise LabError(
            LabErrorCode.CONFIG_INVALID,
            f"{origin}: unknown key {dotted!r}; expected section.key with section in "
            f"{', '.join((TOP_LEVEL_SECTION, *SECTIONS))}",
        )


def _merge(base: dict[str, Any], extra: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for k, v in extra.items():
        if isinstance(v, Mapping) and isinstance(merged.get(k), dict):
            merged[k] = _merge(merged[k], v)
        else:
            merged[k] = v
    return merged


class ConfigLoader:
    """
    Unified configuration access:
    schema defaults < config file < environment (LSRO__SECTION__KEY, .env honoured) < explicit overrides
    """

    @classmethod
    def parse_text(cls, text: str, origin: str = "<config>") -> dict[str, Any]:
        tree: dict[str, Any] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise LabError(
                    LabErrorCode.CONFIG_INVALID,
                    f"{origin}:{lineno}: expected key=value, got {stripped!r}",
                )
            key, _, value = stripped.partition("=")
            _place(tree, key, _parse_value(value), origin=f"{origin}:{lineno}")
        return tree

    @classmethod
    def parse_file(cls, path: str | Path) -> dict[str, Any]:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as e:
            raise LabError(LabErrorCode.CONFIG_INVALID, f"cannot read config file {p}: {e}") from e
        return cls.parse_text(text, origin=str(p))

    @classmethod
    def env_overrides(cls, environ: Mapping[str, str] | None = None) -> dict[str, Any]:
        if environ is None:
            environ = {**{k: v for k, v in dotenv_values(".env").items() if v is not None}, **os.environ}
        tree: dict[str, Any] = {}
        for name, raw in sorted(environ.items()):
            if not name.startswith(ENV_PREFIX):
                continue
            dotted = name[len(ENV_PREFIX) :].lower().replace("__", ".")
            _place(tree, dotted, _parse_value(raw), origin=f"env {name}")
        return tree

    @classmethod
    def load(
        cls,
        path: str | Path | None = None,
        overrides: Mapping[str, Any] | None = None,
        environ: Mapping[str, str] | None = None,
    ) -> ExperimentConfig:
        tree: dict[str, Any] = {}
        if path is not None:
            tree = _merge(tree, cls.parse_file(path))
        tree = _merge(tree, cls.env_overrides(environ))
        if overrides:
            tree = _merge(tree, overrides)
        return cls.validate(tree)

    @classmethod
    def validate(cls, tree: Mapping[str, Any]) -> ExperimentConfig:
        try:
            return ExperimentConfig.model_validate(dict(tree))
        except ValidationError as e:
            problems = "; ".join(f"{'.'.join(str(x) for x in err['loc'])}: {err['msg']}" for err in e.errors())
            raise LabError(
                LabErrorCode.CONFIG_INVALID,
                f"invalid configuration: {problems}",
                details_safe={"errors": [{"loc": list(err["loc"]), "msg": err["msg"]} for err in e.errors()]},
            ) from e
