"""Losses and evaluation metrics for the three task levels."""

import logging
from dataclasses import dataclass

import numpy as np

from ..autodiff import ops
from ..autodiff.tensor import Tensor
from ..exceptions import DataError
from ..graphdata.graph import GraphBatch
from .task import TaskSpec

logger = logging.getLogger(__name__)


def targets_of(batch: GraphBatch, task: TaskSpec) -> np.ndarray:
    """Labels of the batch at the task's level.

    Raises:
        DataError: If the batch carries no labels at that level
    """
    if task.level == "node":
        labels = batch.graph.node_labels
    elif task.level == "edge":
        labels = batch.graph.edge_labels
    else:
        labels = batch.graph_labels
    if labels is None:
        raise DataError(f"Batch has no {task.level}-level labels")
    return labels


def binary_f1(tp: int, fp: int, fn: int) -> float:
    """F1 of the positive class; 0 when there is nothing to score."""
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def edge_pair_counts(
    logits: np.ndarray, labels: np.ndarray, edges: np.ndarray
) -> tuple[int, int, int]:
    """(tp, fp, fn) over unordered edge pairs.

    The logits of both stored directions of a pair are summed before taking
    the argmax, so each undirected edge is scored once.
    """
    pairs: dict[tuple[int, int], list] = {}
    for (s, d), row, label in zip(edges.tolist(), logits, labels.tolist(), strict=True):
        key = (min(s, d), max(s, d))
        if key in pairs:
            pairs[key][0] = pairs[key][0] + row
        else:
            pairs[key] = [row.copy(), label]
    tp = fp = fn = 0
    for summed, label in pairs.values():
        predicted = int(np.argmax(summed)) == 1
        if predicted and label == 1:
            tp += 1
        elif predicted:
            fp += 1
        elif label == 1:
            fn += 1
    return tp, fp, fn


@dataclass
class MetricAccumulator:
    """Accumulates a task metric over several batches."""

    task: TaskSpec
    correct: int = 0
    total: int = 0
    abs_error: float = 0.0
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def update(self, predictions: np.ndarray, batch: GraphBatch) -> None:
        targets = targets_of(batch, self.task)
        if self.task.metric == "mae":
            self.abs_error += float(np.abs(predictions[:, 0] - targets).sum())
            self.total += len(targets)
        elif self.task.metric == "binary_f1":
            tp, fp, fn = edge_pair_counts(predictions, targets, batch.graph.edges)
            self.tp += tp
            self.fp += fp
            self.fn += fn
        else:
            self.correct += int((predictions.argmax(axis=1) == targets).sum())
            self.total += len(targets)

    def value(self) -> float:
        if self.task.metric == "mae":
            return self.abs_error / self.total if self.total else 0.0
        if self.task.metric == "binary_f1":
            return binary_f1(self.tp, self.fp, self.fn)
        return self.correct / self.total if self.total else 0.0


def task_loss(predictions: Tensor, batch: GraphBatch, task: TaskSpec) -> Tensor:
    targets = targets_of(batch, task)
    if task.is_regression:
        diff = predictions - Tensor(np.asarray(targets, dtype=np.float64).reshape(-1, 1))
        return ops.mean_all(ops.absolute(diff))
    return ops.cross_entropy(predictions, np.asarray(targets, dtype=np.int64))


def loss_and_metric(
    predictions: Tensor, batch: GraphBatch, task: TaskSpec
) -> tuple[Tensor, float]:
    """Differentiable loss and the task metric of one batch."""
    acc = MetricAccumulator(task)
    acc.update(predictions.data, batch)
    return task_loss(predictions, batch, task), acc.value()
