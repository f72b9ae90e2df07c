from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from lsro_core.config import TrainConfig
from lsro_core.errors import LabError, LabErrorCode
from lsro_core.rng import stage_rng
from lsro_data.samples import Dataset
from lsro_observability.context import RunContext
from lsro_observability.logging import get_logger
from lsro_observability.metrics import metrics

from .labels import SourceFlag, lsr_rows
from .losses import batch_cross_entropy
from .network import Network, predict_probs
from .optim import lr_at, sgd_momentum_step
from .strategies import OutlierStrategy, get_strategy, target_matrix


@dataclass
class TrainReport:
    strategy: str
    epoch_losses: list[float] = field(default_factory=list)
    epoch_lrs: list[float] = field(default_factory=list)
    generated_used: list[int] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else float("nan")

    def to_dict(self) -> dict:
        return asdict(self)


def label_index(identities: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Contiguous class indices 0..K-1 in ascending identity order."""
    classes, index = np.unique(np.asarray(identities, dtype=np.int64), return_inverse=True)
    return classes, index.astype(np.int64)


def _validate(net: Network, real: Dataset, generated: Dataset, strategy: OutlierStrategy) -> np.ndarray:
    if len(real) == 0:
        raise LabError(LabErrorCode.INVALID_ARGUMENT, "train: no real training samples")
    if np.any(real.sources != SourceFlag.REAL):
        raise LabError(LabErrorCode.INVALID_ARGUMENT, "train: real_data contains generated (Z=1) rows")
    if len(generated) and np.any(generated.sources != SourceFlag.GENERATED):
        raise LabError(LabErrorCode.INVALID_ARGUMENT, "train: generated_data contains labeled (Z=0) rows")
    if len(generated) and not strategy.accepts_generated:
        raise LabError(
            LabErrorCode.INVALID_ARGUMENT,
            f"train: strategy {strategy.key!r} takes no generated samples, got {len(generated)}",
        )
    for name, ds in (("real_data", real), ("generated_data", generated)):
        if len(ds) and ds.dim != net.config.input_dim:
            raise LabError(
                LabErrorCode.SHAPE_MISMATCH,
                f"train: {name} width {ds.dim} != network input_dim {net.config.input_dim}",
            )
    classes, y = label_index(real.identities)
    expected = strategy.head_size(len(classes))
    if net.config.num_classes != expected:
        raise LabError(
            LabErrorCode.INVALID_ARGUMENT,
            f"train: strategy {strategy.key!r} with {len(classes)} identities needs a {expected}-way head, "
            f"network has {net.config.num_classes}",
            details_safe={"strategy": strategy.key, "expected": expected, "actual": net.config.num_classes},
        )
    return y


def train(
    net: Network,
    real_data: Dataset,
    generated_data: Dataset | None,
    cfg: TrainConfig,
    ctx: RunContext | None = None,
) -> TrainReport:
    """
    Mini-batch SGD with momentum over one shuffled pool of real and generated samples.

    Each row's loss is a cross-entropy against its strategy target; the batch
    loss is the mean of the weighted per-row losses.
    """
    log = get_logger(__name__, ctx)
    strategy = get_strategy(cfg.strategy)
    generated = generated_data if generated_data is not None else Dataset.empty(real_data.dim)
    y = _validate(net, real_data, generated, strategy)

    n_real, n_gen = len(real_data), len(generated)
    head = int(net.config.num_classes)
    num_real_classes = head - strategy.extra_classes
    features = real_data.features if n_gen == 0 else np.vstack([real_data.features, generated.features])
    real_targets = lsr_rows(y, head, cfg.lsr_epsilon)
    rng = stage_rng(cfg.seed, "train")

    report = TrainReport(strategy=strategy.key)
    for epoch in range(cfg.epochs):
        lr = lr_at(epoch, cfg)
        active = n_gen > 0 and strategy.uses_generated(epoch, cfg)
        order = rng.permutation(n_real + (n_gen if active else 0))
        total = 0.0
        for start in range(0, order.size, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            _, probs = net.forward(features[idx], train_mode=True, rng=rng)
            is_real = idx < n_real
            predicted = probs.data
            if strategy.needs_prediction and not is_real.all():
                predicted = predict_probs(net, features[idx])
            targets, weights = target_matrix(
                strategy, predicted, is_real, real_targets[idx[is_real]], num_real_classes, cfg
            )
            loss = batch_cross_entropy(probs, targets, weights)
            loss.backward()
            sgd_momentum_step(net, lr, cfg.momentum)
            total += loss.item() * idx.size
        report.epoch_losses.append(total / order.size)
        report.epoch_lrs.append(lr)
        report.generated_used.append(n_gen if active else 0)
        metrics.train_epochs_total.labels(loop="embedder").inc()
        epoch_data = {"epoch": epoch, "loss": report.epoch_losses[-1], "lr": lr, "generated": report.generated_used[-1]}
        log.debug("epoch finished", extra={"data": epoch_data})

    log.info(
        "embedder trained",
        extra={
            "data": {
                "strategy": strategy.key,
                "epochs": cfg.epochs,
                "final_loss": report.final_loss,
                "real": n_real,
                "generated": n_gen,
            }
        },
    )
    return report
