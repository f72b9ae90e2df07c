from __future__ import annotations

import argparse
from pathlib import Path

from lsro.experiments.report import write_report
from lsro.experiments.results import ResultStore, read_results, summarize, write_summary
from lsro.experiments.sweep import expected_cell_count, ordered_strategies, run_sweep
from lsro_core.config import ExperimentConfig

from .base import BaseCommand


class SweepCommand(BaseCommand):
    name = "sweep"
    help = "Run the strategy x generated-count x seed grid, resuming past finished cells"

    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int:
        result = run_sweep(cfg, self.out_dir(cfg))
        store = ResultStore(cfg.output_dir)
        self.write(store.report_path.read_text(encoding="utf-8"))
        self.write(
            f"cells: {len(result.rows)} recorded, {len(result.new_rows)} new, "
            f"{result.skipped} resumed, {len(result.failures)} failed"
        )
        if result.rows:
            self.write(f"expected cells: {expected_cell_count(cfg, result.rows[0].num_real_train)}")
        return 2 if result.failures else 0


class ReportCommand(BaseCommand):
    name = "report"
    help = "Summarize a results CSV into per-strategy means"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--results", type=Path, help="results.csv to summarize (default: <out>/results.csv)")

    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int:
        store = ResultStore(cfg.output_dir)
        rows = read_results(options.results or store.results_path)
        summary = summarize(rows, ordered_strategies(cfg))
        write_summary(store.summary_path, summary)
        self.write(write_report(store.report_path, summary))
        return 0
