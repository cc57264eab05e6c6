"""Dense 2-D tensor and the reverse-mode tape that differentiates it."""

import itertools
import logging
from collections.abc import Callable, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..exceptions import NumericError, ShapeError

logger = logging.getLogger(__name__)

# Creation order of recorded tensors; inputs always receive a lower number than outputs.
_sequence = itertools.count()

_debug = False

BackwardRule = Callable[[np.ndarray], Sequence[np.ndarray | None]]


def set_debug(enabled: bool) -> None:
    """Enable or disable finiteness validation of every op output."""
    global _debug
    _debug = enabled


@contextmanager
def debug_checks(enabled: bool = True):
    """Context manager toggling debug validation for a block."""
    previous = _debug
    set_debug(enabled)
    try:
        yield
    finally:
        set_debug(previous)


def as_matrix(value: Any) -> np.ndarray:
    """Convert a scalar, row or matrix into a 2-D float64 array (copying)."""
    arr = np.array(value, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ShapeError(f"Tensor data must be at most 2-D, got shape {arr.shape}")
    return arr


class Tensor:
    """Dense 2-D float64 matrix that can take part in gradient recording.

    Leaves created with ``requires_grad=True`` are parameters: their ``grad``
    starts at zeros (so a parameter the loss never reaches reads as zero) and
    accumulates across ``backward`` calls until ``zero_grad`` is called.
    Tensors produced by ops record their parents and a backward rule only when
    at least one parent requires a gradient.
    """

    def __init__(self, data: Any, requires_grad: bool = False, name: str | None = None):
        self.data = as_matrix(data)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = np.zeros_like(self.data) if requires_grad else None
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._backward: BackwardRule | None = None
        self._op = ""
        self._seq = next(_sequence)

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: Sequence["Tensor"],
        backward: BackwardRule,
        op: str,
    ) -> "Tensor":
        """Wrap an op result, recording it on the tape when a parent needs gradients."""
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.name = None
        out._op = op
        out._seq = next(_sequence)
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        else:
            out.requires_grad = False
            out._parents = ()
            out._backward = None
        if _debug and not np.all(np.isfinite(data)):
            raise NumericError(f"Non-finite values produced by op '{op}'")
        return out

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def item(self) -> float:
        if self.shape != (1, 1):
            raise ShapeError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.data[0, 0])

    def zero_grad(self) -> None:
        """Reset the accumulated gradient to zeros."""
        self.grad = np.zeros_like(self.data)

    def backward(self) -> None:
        backward(self)

    def __add__(self, other: "Tensor") -> "Tensor":
        from .ops import elementwise

        return elementwise(self, other, "add")

    def __sub__(self, other: "Tensor") -> "Tensor":
        from .ops import elementwise

        return elementwise(self, other, "sub")

    def __mul__(self, other: "Tensor") -> "Tensor":
        from .ops import elementwise

        return elementwise(self, other, "mul")

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from .ops import matmul

        return matmul(self, other)

    def __repr__(self) -> str:
        grad = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{grad})"


@dataclass(frozen=True)
class TapeRecord:
    """One recorded operation: its output, inputs and backward rule."""

    output: Tensor
    inputs: tuple[Tensor, ...]
    rule: BackwardRule


class Tape:
    """Operations reachable from a root tensor, in topological (creation) order."""

    def __init__(self, records: list[TapeRecord]):
        self.records = records

    @classmethod
    def from_output(cls, root: Tensor) -> "Tape":
        seen: set[int] = set()
        records = []
        stack = [root]
        while stack:
            node = stack.pop()
            if id(node) in seen or node.is_leaf:
                continue
            seen.add(id(node))
            records.append(TapeRecord(node, node._parents, node._backward))
            stack.extend(node._parents)
        records.sort(key=lambda r: r.output._seq)
        return cls(records)

    def __len__(self) -> int:
        return len(self.records)

    def run_backward(self, root: Tensor, seed: np.ndarray) -> None:
        """Propagate ``seed`` from ``root`` to every leaf requiring gradients."""
        pending: dict[int, np.ndarray] = {id(root): seed}
        leaves: dict[int, tuple[Tensor, np.ndarray]] = {}

        def deposit(tensor: Tensor, grad: np.ndarray) -> None:
            if not tensor.requires_grad:
                return
            if tensor.is_leaf:
                if id(tensor) in leaves:
                    total = leaves[id(tensor)][1]
                    np.add(total, grad, out=total)
                else:
                    leaves[id(tensor)] = (tensor, np.array(grad, dtype=np.float64))
                return
            key = id(tensor)
            if key in pending:
                pending[key] = pending[key] + grad
            else:
                pending[key] = grad

        if root.is_leaf:
            deposit(root, seed)
        for record in reversed(self.records):
            grad_out = pending.pop(id(record.output), None)
            if grad_out is None:
                continue
            grads = record.rule(grad_out)
            for parent, grad in zip(record.inputs, grads, strict=True):
                if grad is not None:
                    deposit(parent, grad)

        for tensor, grad in leaves.values():
            if tensor.grad is None:
                tensor.grad = grad
            else:
                tensor.grad += grad


def backward(loss: Tensor) -> None:
    """Populate ``grad`` on every parameter the scalar ``loss`` depends on.

    Raises:
        ShapeError: If ``loss`` is not 1x1
    """
    if loss.shape != (1, 1):
        raise ShapeError(f"backward() needs a scalar (1x1) loss, got {loss.shape}")
    tape = Tape.from_output(loss)
    logger.debug(f"Running backward over {len(tape)} recorded ops")
    tape.run_backward(loss, np.ones((1, 1)))
