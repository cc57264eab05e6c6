"""Bilevel supernet search: alternating architecture and weight updates."""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..autodiff.tensor import backward
from ..exceptions import ConfigError, DataError, NumericError
from ..graphdata.graph import Graph, batch
from ..network.metrics import task_loss
from ..network.model import Network
from ..network.trainer import evaluate
from ..searchspace.genotype import Genotype
from ..utils import iter_batches
from .derive import derive
from .optim import SGD, Adam, cosine_lr

logger = logging.getLogger(__name__)

LOG_HEADER = ["epoch", "train_loss", "val_loss", "metric", "lr"]


@dataclass
class SearchConfig:
    """Search hyperparameters.

    Attributes:
        epochs: Passes over the training half (0 derives from the initial alphas)
        batch_size: Graphs per batch for both halves
        w_lr: Initial weight learning rate, cosine-annealed to 0
        w_momentum: SGD momentum for the weights
        w_weight_decay: L2 decay for the weights (not biases or norm scale/shift)
        alpha_lr: Adam learning rate for the architecture weights (0 freezes them)
        alpha_betas: Adam betas for the architecture weights
        alpha_weight_decay: L2 decay for the architecture weights
        seed: Seed of the batch shuffling
    """

    epochs: int = 40
    batch_size: int = 64
    w_lr: float = 0.025
    w_momentum: float = 0.9
    w_weight_decay: float = 3e-4
    alpha_lr: float = 3e-4
    alpha_betas: tuple[float, float] = (0.5, 0.999)
    alpha_weight_decay: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        self.alpha_betas = tuple(self.alpha_betas)
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be positive, got {self.batch_size}")
        if self.w_lr <= 0 or self.alpha_lr < 0:
            raise ConfigError("w_lr must be positive and alpha_lr non-negative")


@dataclass
class SearchResult:
    genotype: Genotype
    trajectory: list[list[dict[str, Any]]] = field(default_factory=list)
    history: list[dict[str, float]] = field(default_factory=list)


class Searcher:
    """Coordinates the search of one supernet over a training and a validation split."""

    def __init__(
        self, model: Network, config: SearchConfig, output_dir: str | Path | None = None
    ):
        """Initialize the searcher.

        Args:
            model: Supernet (a network built without a genotype)
            config: Search hyperparameters
            output_dir: Directory for the log, snapshots and final genotype (optional)

        Raises:
            ConfigError: If ``model`` is a derived network
        """
        if not model.is_supernet:
            raise ConfigError("Search needs a supernet, got a derived network")
        self.model = model
        self.config = config
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.alphas = model.alphas
        self.w_optimizer = SGD(
            list(model.named_parameters()),
            momentum=config.w_momentum,
            weight_decay=config.w_weight_decay,
        )
        self.alpha_optimizer = Adam(
            self.alphas.named_parameters(),
            lr=config.alpha_lr,
            betas=config.alpha_betas,
            weight_decay=config.alpha_weight_decay,
        )
        self.rng = np.random.default_rng(config.seed)
        self.step_count = 0

    def derive(self) -> Genotype:
        return derive(self.alphas, self.model.config.d_v, self.model.config.d_e)

    def _loss(self, graphs: list[Graph], what: str, epoch: int) -> float:
        self.model.zero_grad()
        self.alphas.zero_grad()
        merged = batch(graphs)
        loss = task_loss(self.model(merged), merged, self.model.config.task)
        value = loss.item()
        if not np.isfinite(value):
            raise NumericError(
                f"Non-finite {what} loss ({value}) at epoch {epoch}, step {self.step_count}"
            )
        backward(loss)
        return value

    def alpha_step(self, graphs: list[Graph], epoch: int = 0) -> float:
        """Update only the architecture weights on a validation batch (first-order)."""
        value = self._loss(graphs, "validation", epoch)
        self.alpha_optimizer.step()
        return value

    def weight_step(self, graphs: list[Graph], lr: float, epoch: int = 0) -> float:
        """Update only the supernet weights on a training batch."""
        value = self._loss(graphs, "training", epoch)
        self.w_optimizer.step(lr)
        return value

    def run_epoch(self, epoch: int, train: list[Graph], val: list[Graph], total_steps: int):
        self.model.train()
        train_batches = list(iter_batches(train, self.config.batch_size, self.rng))
        val_batches = list(iter_batches(val, self.config.batch_size, self.rng))
        train_losses, val_losses = [], []
        lr = 0.0
        for k, train_batch in enumerate(train_batches):
            lr = cosine_lr(self.step_count, total_steps, self.config.w_lr)
            val_losses.append(self.alpha_step(val_batches[k % len(val_batches)], epoch))
            train_losses.append(self.weight_step(train_batch, lr, epoch))
            self.step_count += 1
            logger.debug(
                f"Epoch {epoch} step {k}: train_loss={train_losses[-1]:.4f} "
                f"val_loss={val_losses[-1]:.4f} lr={lr:.5f}"
            )
        return float(np.mean(train_losses)), float(np.mean(val_losses)), lr

    def search(self, train: list[Graph], val: list[Graph]) -> SearchResult:
        """Run the alternating search and return the final derived genotype.

        Args:
            train: Graphs for the weight steps
            val: Graphs for the architecture steps

        Returns:
            SearchResult with the final genotype, the alpha trajectory
            (initial state plus one snapshot per epoch) and per-epoch history

        Raises:
            DataError: If either split is empty
            NumericError: If a loss becomes non-finite
        """
        if not train or not val:
            raise DataError(
                f"Search needs non-empty splits, got {len(train)} train / {len(val)} val graphs"
            )
        cfg = self.config
        steps_per_epoch = math.ceil(len(train) / cfg.batch_size)
        total_steps = cfg.epochs * steps_per_epoch
        logger.info(
            f"Starting search: {cfg.epochs} epochs, {steps_per_epoch} steps per epoch, "
            f"{len(self.alphas)} alpha vectors, {self.model.num_parameters()} weights"
        )

        result = SearchResult(genotype=self.derive(), trajectory=[self.alphas.snapshot()])
        writer, f = self._open_log()
        try:
            for epoch in range(1, cfg.epochs + 1):
                train_loss, val_loss, lr = self.run_epoch(epoch, train, val, total_steps)
                _, metric = evaluate(self.model, val, cfg.batch_size)
                genotype = self.derive()
                row = {
                    "epoch": epoch,
                    "train_loss": train_loss,
                    "val_loss": val_loss,
                    "metric": metric,
                    "lr": lr,
                }
                result.history.append(row)
                result.trajectory.append(self.alphas.snapshot())
                result.genotype = genotype
                if writer is not None:
                    writer.writerow([epoch] + [repr(row[key]) for key in LOG_HEADER[1:]])
                    f.flush()
                    genotype.save(self.output_dir / f"genotype_epoch_{epoch}.json")
                logger.info(
                    f"Epoch {epoch}/{cfg.epochs}: train_loss={train_loss:.4f} "
                    f"val_loss={val_loss:.4f} metric={metric:.4f} lr={lr:.5f}"
                )
        finally:
            if f is not None:
                f.close()

        if self.output_dir is not None:
            result.genotype.save(self.output_dir / "genotype.json")
            with open(self.output_dir / "alphas.json", "w") as out:
                json.dump(result.trajectory, out)
                out.write("\n")
            logger.info(f"Wrote genotype and alpha trajectory to {self.output_dir}")
        return result

    def _open_log(self):
        if self.output_dir is None:
            return None, None
        self.output_dir.mkdir(parents=True, exist_ok=True)
        f = open(self.output_dir / "search_log.csv", "w", newline="")
        writer = csv.writer(f)
        writer.writerow(LOG_HEADER)
        return writer, f
