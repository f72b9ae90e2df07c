from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from lsro_core.config import ExperimentConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_data.features_io import read_features
from lsro_data.manifest import read_manifest, resolve
from lsro_data.samples import Dataset, Split
from lsro_eval.export import write_metrics_csv
from lsro_eval.retrieval import evaluate
from lsro_nets.checkpoint import load_checkpoint
from lsro_nets.network import extract_embeddings

from .base import BaseCommand


def _by_split(samples: Dataset, split: Split) -> Dataset:
    return samples.subset(np.flatnonzero(samples.splits == split))


class EvaluateCommand(BaseCommand):
    name = "evaluate"
    help = "Compute CMC and mAP from query and gallery embedding (or feature) files"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--features", type=Path, help="One LSROFEAT file holding query and gallery rows")
        parser.add_argument("--query", type=Path, help="LSROFEAT query file")
        parser.add_argument("--gallery", type=Path, help="LSROFEAT gallery file")
        parser.add_argument("--manifest", type=Path, help="Manifest with embeddings_query / embeddings_gallery roles")
        parser.add_argument("--checkpoint", type=Path, help="Embed the inputs with this network first")
        parser.add_argument("--mode", choices=("single", "multi"), help="Query mode (default: eval.mode)")
        parser.add_argument("--k-max", type=int, dest="k_max", help="Longest CMC rank (default: eval.k_max)")

    def _inputs(self, options: argparse.Namespace) -> tuple[Dataset, Dataset]:
        if options.features:
            samples = read_features(options.features)
            return _by_split(samples, Split.QUERY), _by_split(samples, Split.GALLERY)
        if options.query and options.gallery:
            return read_features(options.query), read_features(options.gallery)
        if options.manifest:
            entries = read_manifest(options.manifest)
            return (
                read_features(resolve(options.manifest, entries, "embeddings_query")),
                read_features(resolve(options.manifest, entries, "embeddings_gallery")),
            )
        raise LabError(LabErrorCode.CONFIG_INVALID, "evaluate needs --features, --query with --gallery, or --manifest")

    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int:
        query, gallery = self._inputs(options)
        if options.checkpoint:
            net = load_checkpoint(options.checkpoint)
            query = query.with_features(extract_embeddings(net, query))
            gallery = gallery.with_features(extract_embeddings(net, gallery))

        metrics = evaluate(query, gallery, options.mode or cfg.eval.mode, options.k_max or cfg.eval.k_max)
        write_metrics_csv(self.out_dir(cfg) / "metrics.csv", metrics)
        self.write_json({**metrics.to_dict(), "rank1": metrics.rank1})
        return 0
