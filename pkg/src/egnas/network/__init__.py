"""Stacked-cell networks, task heads, metrics, retraining and checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .metrics import MetricAccumulator, binary_f1, loss_and_metric, task_loss
from .model import Network
from .task import NetworkConfig, TaskSpec
from .trainer import TrainConfig, Trainer, TrainResult, evaluate
