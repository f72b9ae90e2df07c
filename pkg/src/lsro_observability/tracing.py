from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from typing import Any

import numpy as np

try:
    from opentelemetry import trace
    from opentelemetry.trace import Status, StatusCode

    OTEL_AVAILABLE = True
except ImportError:
    OTEL_AVAILABLE = False
    trace = None

TRACER_NAME = "lsro-lab"


def span_attributes(attributes: Mapping[str, Any] | None) -> dict[str, Any]:
    """Drop unset fields and unwrap numpy scalars; span attributes take only plain primitives."""
    out: dict[str, Any] = {}
    for key, value in (attributes or {}).items():
        if value is None:
            continue
        if isinstance(value, np.generic):
            value = value.item()
        out[key] = value if isinstance(value, str | bool | int | float) else str(value)
    return out


@contextmanager
def trace_span(name: str, attributes: Mapping[str, Any] | None = None) -> Iterator[Any]:
    """One span per pipeline stage. Yields None when opentelemetry is not installed."""
    if not OTEL_AVAILABLE:
        yield None
        return

    with trace.get_tracer(TRACER_NAME).start_as_current_span(name, attributes=span_attributes(attributes)) as span:
        try:
            yield span
        except Exception as e:
            span.record_exception(e)
            span.set_status(Status(StatusCode.ERROR, f"{type(e).__name__}: {e}"))
            raise
        span.set_status(Status(StatusCode.OK))
