"""Optimizers and learning-rate schedules."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..autodiff.module import NO_DECAY_SUFFIXES
from ..autodiff.tensor import Tensor

logger = logging.getLogger(__name__)


def cosine_lr(step: int, total_steps: int, lr0: float) -> float:
    """Cosine annealing from ``lr0`` at step 0 down to 0 at ``total_steps``."""
    if total_steps <= 0:
        return lr0
    return 0.5 * lr0 * (1.0 + math.cos(math.pi * min(step, total_steps) / total_steps))


def sgd_momentum_step(
    param: np.ndarray,
    grad: np.ndarray,
    velocity: np.ndarray,
    lr: float,
    momentum: float = 0.9,
    weight_decay: float = 0.0,
) -> None:
    """In place: v <- momentum * v + (g + wd * p); p <- p - lr * v."""
    velocity *= momentum
    velocity += grad + weight_decay * param
    param -= lr * velocity


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0


def adam_step(
    param: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> None:
    """In place Adam update with bias correction and L2 decay added to the gradient."""
    b1, b2 = betas
    g = grad + weight_decay * param
    state.step += 1
    state.m *= b1
    state.m += (1 - b1) * g
    state.v *= b2
    state.v += (1 - b2) * g * g
    m_hat = state.m / (1 - b1**state.step)
    v_hat = state.v / (1 - b2**state.step)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)


def decays(name: str) -> bool:
    """Biases and batch-norm scale/shift are excluded from weight decay."""
    return not name.rsplit(".", 1)[-1].endswith(NO_DECAY_SUFFIXES)


def _grad(tensor: Tensor) -> np.ndarray:
    return tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)


class SGD:
    """Momentum SGD over named parameters."""

    def __init__(
        self,
        named_params: list[tuple[str, Tensor]],
        momentum: float = 0.9,
        weight_decay: float = 0.0,
    ):
        self.named_params = named_params
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity = {name: np.zeros_like(p.data) for name, p in named_params}

    def step(self, lr: float) -> None:
        for name, param in self.named_params:
            wd = self.weight_decay if decays(name) else 0.0
            sgd_momentum_step(
                param.data, _grad(param), self.velocity[name], lr, self.momentum, wd
            )


class Adam:
    """Adam over named parameters."""

    def __init__(
        self,
        named_params: list[tuple[str, Tensor]],
        lr: float,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        self.named_params = named_params
        self.lr = lr
        self.betas = tuple(betas)
        self.eps = eps
        self.weight_decay = weight_decay
        self.state = {
            name: AdamState(np.zeros_like(p.data), np.zeros_like(p.data))
            for name, p in named_params
        }

    def step(self, lr: float | None = None) -> None:
        lr = self.lr if lr is None else lr
        for name, param in self.named_params:
            adam_step(
                param.data,
                _grad(param),
                self.state[name],
                lr,
                self.betas,
                self.eps,
                self.weight_decay,
            )


@dataclass
class PlateauScheduler:
    """Halve the learning rate when the validation loss stops improving.

    After ``patience`` consecutive epochs without improvement the rate is
    multiplied by ``factor`` (never below ``floor``). Training should stop
    once ``max_stale_halvings`` halvings happened since the last improvement.
    """

    lr: float
    patience: int = 10
    factor: float = 0.5
    floor: float = 1e-5
    max_stale_halvings: int = 2
    best: float = field(default=math.inf, init=False)
    bad_epochs: int = field(default=0, init=False)
    stale_halvings: int = field(default=0, init=False)

    def step(self, val_loss: float) -> bool:
        """Record one epoch's validation loss; returns True if it improved."""
        if val_loss < self.best:
            self.best = val_loss
            self.bad_epochs = 0
            self.stale_halvings = 0
            return True
        self.bad_epochs += 1
        if self.bad_epochs >= self.patience:
            self.lr = max(self.lr * self.factor, self.floor)
            self.bad_epochs = 0
            self.stale_halvings += 1
            logger.info(f"Validation loss plateaued, learning rate now {self.lr:.2e}")
        return False

    @property
    def should_stop(self) -> bool:
        return self.stale_halvings >= self.max_stale_halvings
