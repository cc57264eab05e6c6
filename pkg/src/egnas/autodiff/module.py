"""Parameter containers built on the tensor ops."""

import logging
from collections.abc import Iterator

import numpy as np

from . import ops
from .tensor import Tensor

logger = logging.getLogger(__name__)

# Parameter names excluded from weight decay.
NO_DECAY_SUFFIXES = ("bias", "scale", "shift")


def uniform_init(rng: np.random.Generator, fan_in: int, shape: tuple[int, int]) -> np.ndarray:
    """Uniform values in +-1/sqrt(fan_in)."""
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


class Module:
    """Base class for anything holding parameters.

    Parameters are discovered from instance attributes in assignment order:
    Tensors with ``requires_grad``, nested Modules, and lists or dicts of
    Modules. The resulting dotted names are stable and used by checkpoints
    and optimizers.
    """

    training = True

    def forward(self, *args, **kwargs):
        raise NotImplementedError("Subclasses must implement forward method")

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def _children(self) -> Iterator[tuple[str, object]]:
        for name, value in vars(self).items():
            if isinstance(value, Tensor | Module):
                yield name, value
            elif isinstance(value, list | tuple):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield f"{name}.{i}", item
            elif isinstance(value, dict):
                for key, item in value.items():
                    if isinstance(item, Module):
                        yield f"{name}.{key}", item

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for name, child in self._children():
            full = f"{prefix}{name}"
            if isinstance(child, Tensor):
                if child.requires_grad:
                    yield full, child
            else:
                yield from child.named_parameters(f"{full}.")

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def named_buffers(self, prefix: str = "") -> Iterator[tuple[str, np.ndarray]]:
        """Non-learnable state arrays (e.g. batch-norm running statistics)."""
        for name, child in self._children():
            if isinstance(child, Module):
                yield from child.named_buffers(f"{prefix}{name}.")

    def set_buffer(self, name: str, value: np.ndarray) -> None:
        raise KeyError(f"Unknown buffer: {name}")

    def modules(self) -> Iterator["Module"]:
        yield self
        for _, child in self._children():
            if isinstance(child, Module):
                yield from child.modules()

    def train(self, mode: bool = True) -> "Module":
        for module in self.modules():
            module.training = mode
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def num_parameters(self) -> int:
        return sum(p.data.size for p in self.parameters())


class Linear(Module):
    """Affine map ``x @ weight + bias`` applied row-wise."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, bias: bool = True):
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.weight = Tensor(uniform_init(rng, in_dim, (in_dim, out_dim)), requires_grad=True)
        self.bias = Tensor(np.zeros((1, out_dim)), requires_grad=True) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        out = ops.matmul(x, self.weight)
        if self.bias is not None:
            out = ops.elementwise(out, self.bias, "add")
        return out


class BatchNorm(Module):
    """Per-column batch normalization with running statistics."""

    def __init__(self, width: int, momentum: float = 0.1, eps: float = 1e-5):
        self.state = ops.BatchNormState(width, momentum=momentum, eps=eps)
        self.scale = self.state.scale
        self.shift = self.state.shift

    def forward(self, x: Tensor) -> Tensor:
        return ops.batch_norm(x, self.state, self.training)

    def named_buffers(self, prefix: str = "") -> Iterator[tuple[str, np.ndarray]]:
        yield f"{prefix}running_mean", self.state.running_mean
        yield f"{prefix}running_var", self.state.running_var

    def set_buffer(self, name: str, value: np.ndarray) -> None:
        if name == "running_mean":
            self.state.running_mean = np.array(value, dtype=np.float64)
        elif name == "running_var":
            self.state.running_var = np.array(value, dtype=np.float64)
        else:
            super().set_buffer(name, value)


class Dropout(Module):
    """Inverted dropout drawing masks from its own seeded generator."""

    def __init__(self, rate: float, rng: np.random.Generator):
        self.rate = rate
        self.rng = rng

    def forward(self, x: Tensor) -> Tensor:
        return ops.dropout(x, self.rate, self.rng, self.training)


def find_module(root: Module, dotted: str) -> Module:
    """Resolve a dotted module path such as ``cells.0.proj_v``."""
    node: object = root
    for part in dotted.split(".") if dotted else []:
        if isinstance(node, list | tuple):
            node = node[int(part)]
        elif isinstance(node, dict):
            node = node[part]
        else:
            node = getattr(node, part)
    if not isinstance(node, Module):
        raise KeyError(f"'{dotted}' does not name a module")
    return node
