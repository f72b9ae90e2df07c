"""
Result rows and the CSV files a sweep writes under its output directory.

``results.csv`` carries no timing so that reruns are byte-identical; wall time
lives in ``timings.csv`` keyed by the same cell columns.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lsro_core.errors import LabError, LabErrorCode

KEY_COLUMNS = ("strategy", "outlier_source", "num_generated", "seed")
RESULT_COLUMNS = (*KEY_COLUMNS, "num_real_train", "rank1", "rank5", "rank10", "map", "top1", "train_loss_final")
TIMING_COLUMNS = (*KEY_COLUMNS, "wall_time_seconds")
METRIC_COLUMNS = ("rank1", "rank5", "rank10", "map", "top1")
SUMMARY_COLUMNS = (
    "strategy",
    "outlier_source",
    "num_generated",
    "runs",
    *(f"{m}_{stat}" for m in METRIC_COLUMNS for stat in ("mean", "std")),
)

CellKey = tuple[str, str, int, int]


def _fmt(value: float) -> str:
    return "" if value is None or math.isnan(value) else f"{value:.6f}"


def _parse(value: str) -> float:
    return float(value) if value != "" else float("nan")


@dataclass(frozen=True)
class ResultRow:
    strategy: str
    outlier_source: str
    num_generated: int
    seed: int
    num_real_train: int
    rank1: float
    rank5: float
    rank10: float
    map: float
    top1: float
    train_loss_final: float
    wall_time_seconds: float = 0.0

    def __post_init__(self) -> None:
        for name in ("rank1", "rank5", "rank10", "map"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise LabError(LabErrorCode.INTERNAL_ERROR, f"result {name}={value} outside [0, 1]")

    @property
    def key(self) -> CellKey:
        return (self.strategy, self.outlier_source, self.num_generated, self.seed)

    def result_record(self) -> list[str]:
        return [
            self.strategy,
            self.outlier_source,
            str(self.num_generated),
            str(self.seed),
            str(self.num_real_train),
            *(_fmt(getattr(self, m)) for m in METRIC_COLUMNS),
            _fmt(self.train_loss_final),
        ]

    def timing_record(self) -> list[str]:
        return [*self.result_record()[:4], f"{self.wall_time_seconds:.3f}"]

    @classmethod
    def from_record(cls, record: dict[str, str]) -> ResultRow:
        try:
            return cls(
                strategy=record["strategy"],
                outlier_source=record["outlier_source"],
                num_generated=int(record["num_generated"]),
                seed=int(record["seed"]),
                num_real_train=int(record["num_real_train"]),
                rank1=_parse(record["rank1"]),
                rank5=_parse(record["rank5"]),
                rank10=_parse(record["rank10"]),
                map=_parse(record["map"]),
                top1=_parse(record["top1"]),
                train_loss_final=_parse(record["train_loss_final"]),
            )
        except (KeyError, ValueError) as e:
            raise LabError(LabErrorCode.FORMAT_ERROR, f"malformed results row {record!r}: {e}") from e


def _read_csv(path: Path, columns: Sequence[str]) -> list[dict[str, str]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != tuple(columns):
            raise LabError(
                LabErrorCode.FORMAT_ERROR,
                f"{path}: header {reader.fieldnames} does not match {list(columns)}",
            )
        return list(reader)


def read_results(path: str | Path) -> list[ResultRow]:
    p = Path(path)
    if not p.exists():
        raise LabError(LabErrorCode.FORMAT_ERROR, f"results file {p} does not exist")
    return [ResultRow.from_record(r) for r in _read_csv(p, RESULT_COLUMNS)]


class ResultStore:
    """Single writer for the results and timings files of one output directory."""

    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)
        self.results_path = self.out_dir / "results.csv"
        self.timings_path = self.out_dir / "timings.csv"
        self.summary_path = self.out_dir / "summary.csv"
        self.report_path = self.out_dir / "report.txt"

    def rows(self) -> list[ResultRow]:
        return read_results(self.results_path) if self.results_path.exists() else []

    def completed_keys(self) -> set[CellKey]:
        return {row.key for row in self.rows()}

    def _append(self, path: Path, header: Sequence[str], record: list[str]) -> None:
        new = not path.exists() or path.stat().st_size == 0
        with path.open("a", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if new:
                writer.writerow(header)
            writer.writerow(record)
            fh.flush()

    def append(self, row: ResultRow) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._append(self.results_path, RESULT_COLUMNS, row.result_record())
        self._append(self.timings_path, TIMING_COLUMNS, row.timing_record())


@dataclass(frozen=True)
class SummaryRow:
    strategy: str
    outlier_source: str
    num_generated: int
    runs: int
    means: dict[str, float]
    stds: dict[str, float]

    def record(self) -> list[str]:
        stats = []
        for m in METRIC_COLUMNS:
            stats.extend((_fmt(self.means[m]), _fmt(self.stds[m])))
        return [self.strategy, self.outlier_source, str(self.num_generated), str(self.runs), *stats]


def _stat(values: np.ndarray, fn) -> float:
    finite = values[~np.isnan(values)]
    return float(fn(finite)) if finite.size else float("nan")


def summarize(rows: Iterable[ResultRow], strategy_order: Sequence[str] = ()) -> list[SummaryRow]:
    """Mean and population std over seeds per (strategy, source, count); baseline first, counts ascending."""
    groups: dict[tuple[str, str, int], list[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.strategy, row.outlier_source, row.num_generated), []).append(row)

    order = ["baseline", *(s for s in strategy_order if s != "baseline")]

    def sort_key(group: tuple[str, str, int]) -> tuple:
        strategy, source, count = group
        rank = order.index(strategy) if strategy in order else len(order)
        return (rank, strategy, source, count)

    summary = []
    for group in sorted(groups, key=sort_key):
        members = groups[group]
        means, stds = {}, {}
        for m in METRIC_COLUMNS:
            values = np.array([getattr(r, m) for r in members], dtype=np.float64)
            means[m] = _stat(values, np.mean)
            stds[m] = _stat(values, np.std)
        summary.append(SummaryRow(*group, runs=len(members), means=means, stds=stds))
    return summary


def write_summary(path: str | Path, summary: Sequence[SummaryRow]) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerows(s.record() for s in summary)


def read_summary(path: str | Path) -> list[SummaryRow]:
    p = Path(path)
    if not p.exists():
        raise LabError(LabErrorCode.FORMAT_ERROR, f"summary file {p} does not exist")
    out = []
    for r in _read_csv(p, SUMMARY_COLUMNS):
        try:
            out.append(
                SummaryRow(
                    strategy=r["strategy"],
                    outlier_source=r["outlier_source"],
                    num_generated=int(r["num_generated"]),
                    runs=int(r["runs"]),
                    means={m: _parse(r[f"{m}_mean"]) for m in METRIC_COLUMNS},
                    stds={m: _parse(r[f"{m}_std"]) for m in METRIC_COLUMNS},
                )
            )
        except ValueError as e:
            raise LabError(LabErrorCode.FORMAT_ERROR, f"{p}: malformed summary row {r!r}: {e}") from e
    return out
