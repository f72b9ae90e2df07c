"""One JSON object per log line, tagged with the run context of the cell that emitted it."""

from __future__ import annotations

import datetime
import json
import logging
import sys
from typing import Any, TextIO

import numpy as np

from .context import RunContext

SERVICE = "lsro-lab"


def _to_json(value: Any) -> Any:
    # losses and metrics arrive as numpy scalars or small arrays
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class JSONFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, Any] = {
            "ts": datetime.datetime.fromtimestamp(record.created, datetime.timezone.utc).isoformat(),
            "level": record.levelname,
            "service": SERVICE,
            "message": record.getMessage(),
            "logger": record.name,
        }
        ctx_fields = getattr(record, "ctx_fields", None)
        if isinstance(ctx_fields, dict):
            entry.update(ctx_fields)
        data = getattr(record, "data", None)
        if isinstance(data, dict):
            entry["data"] = data
        if record.exc_info:
            entry["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=_to_json)


class ContextAdapter(logging.LoggerAdapter):
    """Stamps every record with the fields of a ``RunContext``."""

    def __init__(self, logger: logging.Logger, ctx: RunContext | None = None):
        super().__init__(logger, {})
        self.ctx = ctx

    def for_stage(self, stage: str) -> ContextAdapter:
        ctx = self.ctx.with_stage(stage) if self.ctx else None
        return ContextAdapter(self.logger, ctx)

    def process(self, msg: str, kwargs: Any) -> tuple[str, Any]:
        extra = dict(kwargs.get("extra") or {})
        extra["ctx_fields"] = self.ctx.fields() if self.ctx else {}
        kwargs["extra"] = extra
        return msg, kwargs


def get_logger(name: str, ctx: RunContext | None = None) -> ContextAdapter:
    return ContextAdapter(logging.getLogger(name), ctx)


def configure_logging(level: int = logging.INFO, quiet: bool = False, stream: TextIO | None = None) -> None:
    """JSON lines on stderr; ``quiet`` keeps only warnings and errors."""
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(JSONFormatter())
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(logging.WARNING if quiet else level)
