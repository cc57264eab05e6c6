"""Building blocks shared by the entity and edge operations."""

import numpy as np

from ..autodiff import ops
from ..autodiff.module import BatchNorm, Linear, Module
from ..autodiff.tensor import Tensor


class FilmTransform(Module):
    """Maps a conditioning row to a (gamma, beta) pair of width ``dim`` each.

    The linear output splits into gamma (first ``dim`` columns) and beta
    (last ``dim`` columns).
    """

    def __init__(self, cond_dim: int, dim: int, rng: np.random.Generator):
        self.dim = dim
        self.linear = Linear(cond_dim, 2 * dim, rng)

    def forward(self, cond: Tensor) -> tuple[Tensor, Tensor]:
        out = self.linear(cond)
        return ops.slice_cols(out, 0, self.dim), ops.slice_cols(out, self.dim, 2 * self.dim)

    def set_identity(self) -> None:
        """Force gamma = 1 and beta = 0 for every input."""
        self.linear.weight.data[:] = 0.0
        self.linear.bias.data[:] = 0.0
        self.linear.bias.data[:, : self.dim] = 1.0


class FCReLUBN(Module):
    """Fully connected layer, ReLU, then batch norm.

    ``relu=False`` keeps FC and BN only (used after the gated GRU update).
    """

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, relu: bool = True):
        self.fc = Linear(in_dim, out_dim, rng)
        self.relu = relu
        self.bn = BatchNorm(out_dim)

    def forward(self, x: Tensor) -> Tensor:
        out = self.fc(x)
        if self.relu:
            out = ops.relu(out)
        return self.bn(out)
