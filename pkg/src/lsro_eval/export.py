"""Metrics CSV: ``mode,k,value`` per CMC rank, then ``map`` and ``num_valid_queries`` rows."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from lsro_data.features_io import atomic_write_bytes

from .retrieval import RetrievalMetrics

HEADER = ("mode", "k", "value")


def metrics_rows(metrics: RetrievalMetrics) -> list[tuple[str, str, str]]:
    rows = [(metrics.mode, str(k), f"{v:.6f}") for k, v in enumerate(metrics.cmc, start=1)]
    rows.append((metrics.mode, "map", f"{metrics.map:.6f}"))
    rows.append((metrics.mode, "num_valid_queries", str(metrics.num_valid_queries)))
    return rows


def metrics_csv(*all_metrics: RetrievalMetrics) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for m in all_metrics:
        writer.writerows(metrics_rows(m))
    return buf.getvalue()


def write_metrics_csv(path: str | Path, *all_metrics: RetrievalMetrics) -> None:
    atomic_write_bytes(path, metrics_csv(*all_metrics).encode("utf-8"))
