"""Retraining and evaluation of derived architectures."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..autodiff.tensor import backward
from ..exceptions import NumericError
from ..graphdata.graph import Graph, batch
from ..search.optim import Adam, PlateauScheduler
from ..utils import iter_batches
from .checkpoint import save_checkpoint
from .metrics import MetricAccumulator, task_loss, targets_of
from .model import Network

logger = logging.getLogger(__name__)

METRICS_HEADER = ["epoch", "train_loss", "val_loss", "val_metric", "test_metric", "lr"]


@dataclass
class TrainConfig:
    """Retraining settings: Adam with plateau halving of the learning rate."""

    epochs: int = 50
    batch_size: int = 64
    lr: float = 1e-3
    patience: int = 10
    lr_factor: float = 0.5
    lr_floor: float = 1e-5
    max_stale_halvings: int = 2
    seed: int = 0


@dataclass
class TrainResult:
    best_epoch: int
    best_val_loss: float
    best_val_metric: float
    test_metric: float
    history: list[dict[str, float]] = field(default_factory=list)


def check_finite(value: float, what: str) -> None:
    if not math.isfinite(value):
        raise NumericError(f"Non-finite {what}: {value}")


def evaluate(model: Network, graphs: list[Graph], batch_size: int = 64) -> tuple[float, float]:
    """Mean loss (weighted by target count) and metric of ``model`` on ``graphs``, eval mode."""
    task = model.config.task
    was_training = model.training
    model.eval()
    acc = MetricAccumulator(task)
    loss_sum, count = 0.0, 0
    for chunk in iter_batches(graphs, batch_size):
        merged = batch(chunk)
        predictions = model(merged)
        n = len(targets_of(merged, task))
        loss_sum += task_loss(predictions, merged, task).item() * n
        count += n
        acc.update(predictions.data, merged)
    model.train(was_training)
    return (loss_sum / count if count else 0.0), acc.value()


class Trainer:
    """Trains a derived network from scratch and keeps its best-validation state."""

    def __init__(self, model: Network, config: TrainConfig, output_dir: str | Path | None = None):
        self.model = model
        self.config = config
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.optimizer = Adam(list(model.named_parameters()), lr=config.lr)
        self.scheduler = PlateauScheduler(
            lr=config.lr,
            patience=config.patience,
            factor=config.lr_factor,
            floor=config.lr_floor,
            max_stale_halvings=config.max_stale_halvings,
        )
        self.rng = np.random.default_rng(config.seed)

    def train_epoch(self, graphs: list[Graph]) -> float:
        task = self.model.config.task
        self.model.train()
        losses = []
        for chunk in iter_batches(graphs, self.config.batch_size, self.rng):
            merged = batch(chunk)
            self.model.zero_grad()
            loss = task_loss(self.model(merged), merged, task)
            check_finite(loss.item(), "training loss")
            backward(loss)
            self.optimizer.step(self.scheduler.lr)
            losses.append(loss.item())
        return float(np.mean(losses)) if losses else 0.0

    def fit(self, train: list[Graph], val: list[Graph], test: list[Graph]) -> TrainResult:
        """Train until the epoch budget or the plateau stopping rule ends the run.

        Writes ``metrics.csv`` and the best-validation checkpoint when an
        output directory is set.
        """
        result = TrainResult(best_epoch=0, best_val_loss=math.inf, best_val_metric=0.0, test_metric=0.0)
        writer = None
        f = None
        if self.output_dir is not None:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            f = open(self.output_dir / "metrics.csv", "w", newline="")
            writer = csv.writer(f)
            writer.writerow(METRICS_HEADER)

        try:
            for epoch in range(1, self.config.epochs + 1):
                lr = self.scheduler.lr
                train_loss = self.train_epoch(train)
                val_loss, val_metric = evaluate(self.model, val, self.config.batch_size)
                _, test_metric = evaluate(self.model, test, self.config.batch_size)
                check_finite(val_loss, "validation loss")

                row = {
                    "epoch": epoch,
                    "train_loss": train_loss,
                    "val_loss": val_loss,
                    "val_metric": val_metric,
                    "test_metric": test_metric,
                    "lr": lr,
                }
                result.history.append(row)
                if writer is not None:
                    writer.writerow([repr(row[key]) if key != "epoch" else epoch for key in METRICS_HEADER])
                    f.flush()
                logger.info(
                    f"Epoch {epoch}: train_loss={train_loss:.4f} val_loss={val_loss:.4f} "
                    f"val_metric={val_metric:.4f} test_metric={test_metric:.4f} lr={lr:.2e}"
                )

                if self.scheduler.step(val_loss):
                    result.best_epoch = epoch
                    result.best_val_loss = val_loss
                    result.best_val_metric = val_metric
                    result.test_metric = test_metric
                    if self.output_dir is not None:
                        save_checkpoint(self.model, self.output_dir / "checkpoint", {"epoch": epoch})
                if self.scheduler.should_stop:
                    logger.info(f"Stopping after epoch {epoch}: no improvement across halvings")
                    break
        finally:
            if f is not None:
                f.close()

        logger.info(
            f"Best validation epoch {result.best_epoch}: val_loss={result.best_val_loss:.4f}, "
            f"test metric={result.test_metric:.4f}"
        )
        return result
