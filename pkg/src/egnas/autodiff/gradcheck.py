"""Central finite-difference gradient checking."""

import logging
from collections.abc import Callable, Sequence

import numpy as np

from .tensor import Tensor, backward

logger = logging.getLogger(__name__)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a|| + ||n||, 1e-12)."""
    diff = np.linalg.norm(analytic - numeric)
    return float(diff / max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12))


def numeric_gradient(loss_fn: Callable[[], Tensor], tensor: Tensor, h: float = 1e-5) -> np.ndarray:
    """Central differences of ``loss_fn`` with respect to every entry of ``tensor``."""
    grad = np.zeros_like(tensor.data)
    for idx in np.ndindex(tensor.data.shape):
        original = tensor.data[idx]
        tensor.data[idx] = original + h
        plus = loss_fn().item()
        tensor.data[idx] = original - h
        minus = loss_fn().item()
        tensor.data[idx] = original
        grad[idx] = (plus - minus) / (2 * h)
    return grad


def gradcheck(
    loss_fn: Callable[[], Tensor],
    tensors: Sequence[Tensor],
    h: float = 1e-5,
) -> float:
    """Largest relative error between analytic and numeric gradients.

    Args:
        loss_fn: Rebuilds the scalar loss from the current tensor values
        tensors: Leaves (``requires_grad=True``) to check
        h: Finite-difference step

    Returns:
        Maximum relative error over ``tensors``
    """
    for tensor in tensors:
        tensor.zero_grad()
    backward(loss_fn())
    worst = 0.0
    for tensor in tensors:
        numeric = numeric_gradient(loss_fn, tensor, h)
        err = relative_error(tensor.grad, numeric)
        logger.debug(f"gradcheck {tensor.shape}: relative error {err:.3e}")
        worst = max(worst, err)
    return worst
