from __future__ import annotations

import argparse

from lsro.experiments.cell import prepare_data
from lsro_core.config import ExperimentConfig
from lsro_data.features_io import write_features
from lsro_data.manifest import ManifestEntry, write_manifest
from lsro_data.synth import class_histogram

from .base import BaseCommand

MANIFEST_NAME = "manifest.json"


class GenDataCommand(BaseCommand):
    name = "gen-data"
    help = "Synthesize the dataset, split it and write LSROFEAT files plus a manifest"

    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int:
        out = self.out_dir(cfg)
        data = prepare_data(cfg)
        files = {
            "train": data.split.train,
            "query": data.split.query,
            "gallery": data.split.gallery,
            "heldout": data.heldout,
        }
        entries = []
        for role, samples in files.items():
            name = f"{role}.lsrofeat"
            write_features(out / name, samples)
            entries.append(ManifestEntry(name, role))
        write_manifest(out / MANIFEST_NAME, entries)

        counts = class_histogram(data.split.train)
        self.write_json(
            {
                "manifest": str(out / MANIFEST_NAME),
                "samples": {role: len(samples) for role, samples in files.items()},
                "split": data.split.report.to_dict(),
                "train_samples_per_identity": {"min": min(counts.values()), "max": max(counts.values())},
            }
        )
        return 0
