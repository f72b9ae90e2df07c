"""
Full grid of cells with incremental, resumable CSV output.

Cells are grouped by seed so that one worker trains the seed's GAN once and
reuses it across strategies and counts. Groups are consumed in seed order,
which keeps ``results.csv`` identical whatever the worker count.
"""

from __future__ import annotations

import uuid
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from lsro_core.config import ExperimentConfig
from lsro_core.errors import LabError
from lsro_observability.context import RunContext
from lsro_observability.logging import get_logger
from lsro_observability.metrics import metrics

from .cell import StageCache, prepare_data, run_cell
from .report import write_report
from .results import CellKey, ResultRow, ResultStore, summarize, write_summary


@dataclass(frozen=True)
class CellSpec:
    strategy: str
    num_generated: int
    seed: int

    def key(self, outlier_source: str) -> CellKey:
        return (self.strategy, outlier_source, self.num_generated, self.seed)


@dataclass
class CellOutcome:
    spec: CellSpec
    row: ResultRow | None = None
    error: dict | None = None


@dataclass
class SweepResult:
    rows: list[ResultRow] = field(default_factory=list)
    new_rows: list[ResultRow] = field(default_factory=list)
    failures: list[CellOutcome] = field(default_factory=list)
    skipped: int = 0


def ordered_strategies(cfg: ExperimentConfig) -> list[str]:
    """Configured strategies with baseline first, duplicates dropped."""
    seen = dict.fromkeys(["baseline"] if "baseline" in cfg.strategies else [])
    seen.update(dict.fromkeys(cfg.strategies))
    return list(seen)


def plan_cells(cfg: ExperimentConfig, num_real_train: int) -> list[CellSpec]:
    """Baseline runs at count 0 only; every other strategy at each non-zero count."""
    counts = cfg.counts_for(num_real_train)
    cells = []
    for repeat in range(cfg.repeats):
        seed = cfg.seed + repeat
        for strategy in ordered_strategies(cfg):
            grid = [0] if strategy == "baseline" else [c for c in counts if c > 0]
            cells.extend(CellSpec(strategy, count, seed) for count in grid)
    return cells


def expected_cell_count(cfg: ExperimentConfig, num_real_train: int) -> int:
    nonzero = sum(1 for c in cfg.counts_for(num_real_train) if c > 0)
    strategies = ordered_strategies(cfg)
    per_seed = sum(1 if s == "baseline" else nonzero for s in strategies)
    return cfg.repeats * per_seed


def run_seed_group(cfg: ExperimentConfig, specs: list[CellSpec], run_id: str) -> list[CellOutcome]:
    cache = StageCache()
    outcomes = []
    for spec in specs:
        ctx = RunContext(run_id=run_id)
        try:
            row = run_cell(cfg, spec.strategy, spec.num_generated, spec.seed, cache, ctx)
            outcomes.append(CellOutcome(spec, row=row))
        except LabError as e:
            outcomes.append(CellOutcome(spec, error=e.to_error_dict()))
    return outcomes


def _groups(cells: list[CellSpec]) -> list[list[CellSpec]]:
    by_seed: dict[int, list[CellSpec]] = {}
    for spec in cells:
        by_seed.setdefault(spec.seed, []).append(spec)
    return [by_seed[s] for s in sorted(by_seed)]


def _outcomes(cfg: ExperimentConfig, groups: list[list[CellSpec]], run_id: str) -> Iterator[CellOutcome]:
    if cfg.workers <= 1 or len(groups) <= 1:
        for group in groups:
            yield from run_seed_group(cfg, group, run_id)
        return
    with ProcessPoolExecutor(max_workers=min(cfg.workers, len(groups))) as pool:
        futures = [pool.submit(run_seed_group, cfg, group, run_id) for group in groups]
        for future in futures:
            yield from future.result()


def run_sweep(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> SweepResult:
    """
    Run every planned cell not already present in ``results.csv``.

    Failed cells are logged and left out; a later run retries them.
    """
    store = ResultStore(out_dir or cfg.output_dir)
    run_id = uuid.uuid4().hex[:12]
    log = get_logger(__name__, RunContext(run_id=run_id, stage="sweep"))

    num_real_train = prepare_data(cfg).num_real_train
    cells = plan_cells(cfg, num_real_train)
    done = store.completed_keys()
    pending = [c for c in cells if c.key(cfg.outlier_source) not in done]
    result = SweepResult(skipped=len(cells) - len(pending))
    log.info(
        "sweep planned",
        extra={"data": {"cells": len(cells), "pending": len(pending), "num_real_train": num_real_train}},
    )

    for outcome in _outcomes(cfg, _groups(pending), run_id):
        if outcome.row is not None:
            store.append(outcome.row)
            result.new_rows.append(outcome.row)
            metrics.cells_completed_total.labels(strategy=outcome.spec.strategy, status="ok").inc()
        else:
            result.failures.append(outcome)
            metrics.cells_completed_total.labels(strategy=outcome.spec.strategy, status="failed").inc()
            log.error(
                "cell failed",
                extra={"data": {"cell": outcome.spec.key(cfg.outlier_source), "error": outcome.error}},
            )

    result.rows = store.rows()
    summary = summarize(result.rows, ordered_strategies(cfg))
    write_summary(store.summary_path, summary)
    write_report(store.report_path, summary)
    log.info(
        "sweep finished",
        extra={"data": {"new": len(result.new_rows), "skipped": result.skipped, "failed": len(result.failures)}},
    )
    return result
