from __future__ import annotations

import argparse
from dataclasses import asdict

from lsro.experiments.cell import StageCache, execute_cell, prepare_data
from lsro_core.config import ExperimentConfig
from lsro_data.features_io import write_features
from lsro_data.manifest import ManifestEntry, write_manifest
from lsro_eval.export import write_metrics_csv
from lsro_nets.checkpoint import save_checkpoint
from lsro_nets.network import extract_embeddings

from .base import BaseCommand


class TrainCommand(BaseCommand):
    name = "train"
    help = "Run one experiment cell and keep its checkpoint, embeddings and metrics"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--strategy", help="Strategy (default: train.strategy)")
        parser.add_argument("--generated", type=int, default=0, help="Number of outlier samples")

    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int:
        out = self.out_dir(cfg)
        strategy = options.strategy or cfg.train.strategy
        cache = StageCache()
        artifacts = execute_cell(cfg, strategy, options.generated, cfg.seed, cache)

        save_checkpoint(artifacts.network, out / "model.lsrockpt")
        split = prepare_data(cfg, cache).split
        for role, samples in (("embeddings_query", split.query), ("embeddings_gallery", split.gallery)):
            embedded = samples.with_features(extract_embeddings(artifacts.network, samples))
            write_features(out / f"{role}.lsrofeat", embedded)
        write_manifest(
            out / "embeddings.json",
            [ManifestEntry(f"{role}.lsrofeat", role) for role in ("embeddings_query", "embeddings_gallery")],
        )
        write_metrics_csv(out / "metrics.csv", artifacts.metrics)

        self.write_json(
            {
                "row": asdict(artifacts.row),
                "train": {"epochs": len(artifacts.report.epoch_losses), "final_loss": artifacts.report.final_loss},
                "checkpoint": str(out / "model.lsrockpt"),
            }
        )
        return 0
