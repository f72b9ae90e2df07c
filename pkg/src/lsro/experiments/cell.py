"""
One experiment cell: (strategy, outlier source, generated count, seed) -> ResultRow.

    data -> [gan] -> outliers -> train -> embed -> evaluate

The dataset and split depend on ``synth.seed`` only; the GAN, outlier draw,
network init and training are seeded from the cell seed, each under its own
stage tag.
"""

from __future__ import annotations

import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from lsro_core.config import ExperimentConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_core.rng import stage_rng
from lsro_data.protocol import SplitResult, classification_holdout, split_protocol
from lsro_data.samples import Dataset
from lsro_data.synth import generate_dataset, heldout_pool
from lsro_eval.classification import top1_accuracy
from lsro_eval.retrieval import RetrievalMetrics, evaluate
from lsro_gan.model import GanModel, train_gan
from lsro_gan.providers import ProviderInputs, build_provider
from lsro_nets.network import Network, build_network, extract_embeddings, predict_probs
from lsro_nets.strategies import get_strategy
from lsro_nets.training import TrainReport, label_index, train
from lsro_observability.context import RunContext
from lsro_observability.logging import get_logger
from lsro_observability.metrics import metrics
from lsro_observability.tracing import trace_span

from .results import ResultRow

REPORTED_RANKS = (1, 5, 10)


@dataclass(frozen=True)
class PreparedData:
    split: SplitResult
    fit: Dataset
    holdout: Dataset
    heldout: Dataset

    @property
    def num_real_train(self) -> int:
        return len(self.fit)


@dataclass
class StageCache:
    """Per-process memo of the seed-level stages shared by many cells."""

    data: dict[str, PreparedData] = field(default_factory=dict)
    gans: dict[tuple[str, int], GanModel] = field(default_factory=dict)


@dataclass
class CellArtifacts:
    row: ResultRow
    network: Network
    report: TrainReport
    metrics: RetrievalMetrics
    outliers: Dataset


def _data_key(cfg: ExperimentConfig) -> str:
    return cfg.synth.model_dump_json() + cfg.eval.model_dump_json()


def prepare_data(cfg: ExperimentConfig, cache: StageCache | None = None) -> PreparedData:
    key = _data_key(cfg)
    if cache is not None and key in cache.data:
        return cache.data[key]
    seed = cfg.synth.seed
    split = split_protocol(generate_dataset(cfg.synth), cfg.synth.train_fraction, stage_rng(seed, "split"))
    fit, holdout = classification_holdout(split.train, cfg.eval.classification_holdout, stage_rng(seed, "holdout"))
    prepared = PreparedData(split=split, fit=fit, holdout=holdout, heldout=heldout_pool(cfg.synth))
    if cache is not None:
        cache.data[key] = prepared
    return prepared


def _gan_for(
    cfg: ExperimentConfig, data: PreparedData, seed: int, cache: StageCache | None, ctx: RunContext
) -> GanModel:
    key = (_data_key(cfg) + cfg.gan.model_dump_json(), seed)
    if cache is not None and key in cache.gans:
        return cache.gans[key]
    gan_cfg = cfg.gan.model_copy(update={"seed": seed, "data_dim": data.fit.dim})
    model = train_gan(data.fit, gan_cfg, ctx)
    if cache is not None:
        cache.gans[key] = model
    return model


@contextmanager
def _stage(name: str, ctx: RunContext) -> Iterator[RunContext]:
    stage_ctx = ctx.with_stage(name)
    with trace_span(f"cell.{name}", stage_ctx.fields()):
        try:
            yield stage_ctx
        except LabError as e:
            raise LabError(
                LabErrorCode.STAGE_FAILED,
                f"{name} failed: {e.message_safe}",
                details_safe={"cause": e.to_error_dict()},
                stage=name,
            ) from e
        except Exception as e:
            raise LabError(
                LabErrorCode.STAGE_FAILED,
                f"{name} failed: {type(e).__name__}: {e}",
                stage=name,
            ) from e


def execute_cell(
    cfg: ExperimentConfig,
    strategy: str,
    num_generated: int,
    seed: int,
    cache: StageCache | None = None,
    ctx: RunContext | None = None,
) -> CellArtifacts:
    """Run every stage of one cell and keep the trained network and intermediates."""
    started = time.perf_counter()
    ctx = ctx or RunContext(run_id=f"{strategy}-{cfg.outlier_source}-{num_generated}-{seed}")
    ctx = RunContext(ctx.run_id, seed=seed, strategy=strategy, num_generated=num_generated)
    log = get_logger(__name__, ctx)

    with _stage("data", ctx):
        data = prepare_data(cfg, cache)
        classes, _ = label_index(data.fit.identities)
        head = get_strategy(strategy).head_size(len(classes))

    outliers = Dataset.empty(data.fit.dim)
    if num_generated > 0:
        if cfg.outlier_source == "gan":
            with _stage("gan", ctx) as stage_ctx:
                gan = _gan_for(cfg, data, seed, cache, stage_ctx)
        else:
            gan = None
        with _stage("outliers", ctx):
            inputs = ProviderInputs(train=data.fit, heldout=data.heldout, gan_model=gan)
            provider = build_provider(cfg.outlier_source, inputs)
            outliers = provider.generate(num_generated, stage_rng(seed, "outliers"))
            log.for_stage("outliers").info(
                "outliers drawn", extra={"data": {"source": cfg.outlier_source, "count": len(outliers)}}
            )

    with _stage("train", ctx) as stage_ctx:
        net_cfg = cfg.net.model_copy(update={"input_dim": data.fit.dim, "num_classes": head})
        net = build_network(net_cfg, stage_rng(seed, "init"))
        train_cfg = cfg.train.model_copy(update={"strategy": strategy, "seed": seed})
        report = train(net, data.fit, outliers, train_cfg, stage_ctx)

    with _stage("evaluate", ctx):
        query = data.split.query.with_features(extract_embeddings(net, data.split.query))
        gallery = data.split.gallery.with_features(extract_embeddings(net, data.split.gallery))
        retrieval = evaluate(query, gallery, cfg.eval.mode, max(cfg.eval.k_max, max(REPORTED_RANKS)))
        top1 = float("nan")
        if len(data.holdout):
            labels = np.searchsorted(classes, data.holdout.identities)
            top1 = top1_accuracy(predict_probs(net, data.holdout), labels)

    elapsed = time.perf_counter() - started
    row = ResultRow(
        strategy=strategy,
        outlier_source=cfg.outlier_source,
        num_generated=num_generated,
        seed=seed,
        num_real_train=data.num_real_train,
        rank1=retrieval.rank(1),
        rank5=retrieval.rank(5),
        rank10=retrieval.rank(10),
        map=retrieval.map,
        top1=top1,
        train_loss_final=report.final_loss,
        wall_time_seconds=elapsed,
    )
    metrics.cell_duration_seconds.labels(strategy=strategy).observe(elapsed)
    log.info("cell finished", extra={"data": {"rank1": row.rank1, "map": row.map, "seconds": round(elapsed, 3)}})
    return CellArtifacts(row=row, network=net, report=report, metrics=retrieval, outliers=outliers)


def run_cell(
    cfg: ExperimentConfig,
    strategy: str,
    num_generated: int,
    seed: int,
    cache: StageCache | None = None,
    ctx: RunContext | None = None,
) -> ResultRow:
    return execute_cell(cfg, strategy, num_generated, seed, cache, ctx).row
