from __future__ import annotations

import argparse
from pathlib import Path

from lsro.experiments.cell import prepare_data
from lsro_core.config import ExperimentConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_core.rng import stage_rng
from lsro_data.features_io import read_features, write_features
from lsro_gan.model import discriminator_accuracy, generate_outliers, train_gan
from lsro_gan.persistence import load_gan, save_gan
from lsro_gan.providers import ProviderInputs, build_provider

from .base import BaseCommand

GAN_FILE = "gan.lsrogan"
OUTLIERS_FILE = "outliers.lsrofeat"
ACCURACY_SAMPLES = 256


class TrainGanCommand(BaseCommand):
    name = "train-gan"
    help = "Train the feature GAN on the real training split and save it"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--train", type=Path, help="LSROFEAT training file (default: synthesize from config)")

    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int:
        out = self.out_dir(cfg)
        real = read_features(options.train) if options.train else prepare_data(cfg).fit
        gan_cfg = cfg.gan.model_copy(update={"seed": cfg.seed, "data_dim": real.dim})
        model = train_gan(real, gan_cfg)
        save_gan(model, out / GAN_FILE)

        fake = generate_outliers(model, ACCURACY_SAMPLES, stage_rng(cfg.seed, "gan-check"))
        self.write_json(
            {
                "gan": str(out / GAN_FILE),
                "epochs": len(model.d_losses),
                "d_loss_final": model.d_losses[-1],
                "g_loss_final": model.g_losses[-1],
                "discriminator_accuracy": discriminator_accuracy(model, real.features, fake.features),
            }
        )
        return 0


class SampleOutliersCommand(BaseCommand):
    name = "sample-outliers"
    help = "Draw unlabeled outlier samples from the configured source"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--count", type=int, required=True, help="Number of outlier samples")
        parser.add_argument("--gan", type=Path, help=f"GAN snapshot (default: <out>/{GAN_FILE})")

    def handle(self, cfg: ExperimentConfig, options: argparse.Namespace) -> int:
        if options.count < 1:
            raise LabError(LabErrorCode.CONFIG_INVALID, f"--count must be >= 1, got {options.count}")
        out = self.out_dir(cfg)
        data = prepare_data(cfg)
        gan_model = None
        if cfg.outlier_source == "gan":
            gan_model = load_gan(options.gan or out / GAN_FILE)
        provider = build_provider(
            cfg.outlier_source, ProviderInputs(train=data.fit, heldout=data.heldout, gan_model=gan_model)
        )
        outliers = provider.generate(options.count, stage_rng(cfg.seed, "outliers"))
        write_features(out / OUTLIERS_FILE, outliers)
        self.write_json({"outliers": str(out / OUTLIERS_FILE), "source": cfg.outlier_source, "count": len(outliers)})
        return 0
