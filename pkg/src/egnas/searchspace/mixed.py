"""Softmax-weighted mixture over every candidate operation of a DAG edge."""

import numpy as np

from ..autodiff import ops
from ..autodiff.module import Module
from ..autodiff.tensor import Tensor
from ..exceptions import ShapeError
from .edge_ops import build_edge_op
from .entity_ops import build_entity_op
from .genotype import EDGE_OPS, ENTITY_OPS, EdgeOpKind, EntityOpKind


class MixedOp(Module):
    """sum_k softmax(alpha)_k * op_k(inputs); each candidate keeps its own parameters."""

    def __init__(self, candidates: list[Module], kinds: tuple):
        if len(candidates) != len(kinds):
            raise ShapeError(f"{len(candidates)} candidates for {len(kinds)} kinds")
        self.kinds = kinds
        self.candidates = {kind.value: op for kind, op in zip(kinds, candidates, strict=True)}

    def weights(self, alpha: Tensor) -> Tensor:
        if alpha.shape != (1, len(self.kinds)):
            raise ShapeError(f"alpha has shape {alpha.shape}, expected (1, {len(self.kinds)})")
        return ops.softmax_rows(alpha)

    def forward(self, alpha: Tensor, *inputs) -> Tensor:
        weights = self.weights(alpha)
        out = None
        for k, kind in enumerate(self.kinds):
            # Zero contributes nothing to the sum; its alpha still enters through the softmax.
            if kind in (EntityOpKind.ZERO, EdgeOpKind.ZERO):
                continue
            term = self.candidates[kind.value](*inputs) * ops.slice_cols(weights, k, k + 1)
            out = term if out is None else out + term
        if out is None:
            out = self.candidates[self.kinds[0].value](*inputs)
        return out


def mixed_entity_op(d_v: int, d_e: int, rng: np.random.Generator) -> MixedOp:
    return MixedOp([build_entity_op(k, d_v, d_e, rng) for k in ENTITY_OPS], ENTITY_OPS)


def mixed_edge_op(d_v: int, d_e: int, rng: np.random.Generator) -> MixedOp:
    return MixedOp([build_edge_op(k, d_v, d_e, rng) for k in EDGE_OPS], EDGE_OPS)
