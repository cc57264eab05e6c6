"""Entity-updating operations: FiLM-modulated neighbor aggregation, skip and zero."""

import logging

import numpy as np

from ..autodiff import ops
from ..autodiff.module import Module
from ..autodiff.tensor import Tensor
from ..exceptions import ShapeError
from ..graphdata.graph import Graph
from .genotype import EntityOpKind
from .layers import FCReLUBN, FilmTransform

logger = logging.getLogger(__name__)

AGGREGATORS = {
    EntityOpKind.SUM: "sum",
    EntityOpKind.MEAN: "mean",
    EntityOpKind.MAX: "max",
}


def _check_inputs(V: Tensor, E: Tensor, graph: Graph, d_v: int, d_e: int) -> None:
    if V.shape != (graph.num_nodes, d_v):
        raise ShapeError(f"Entity features {V.shape}, expected ({graph.num_nodes}, {d_v})")
    if E.shape != (graph.num_edges, d_e):
        raise ShapeError(f"Edge features {E.shape}, expected ({graph.num_edges}, {d_e})")


class EntityOp(Module):
    """Maps (V_i, E_i) on a graph to a new |V| x d_V entity representation."""

    kind: EntityOpKind

    def __init__(self, d_v: int, d_e: int):
        self.d_v = d_v
        self.d_e = d_e

    def forward(self, V: Tensor, E: Tensor, graph: Graph) -> Tensor:
        raise NotImplementedError("Subclasses must implement forward method")


class AggregateEntityOp(EntityOp):
    """Message m(s,t) = gamma(s,t) * V(s) + beta(s,t), with (gamma, beta) read
    from the edge features, aggregated over in-edges of t and wrapped in
    FC-ReLU-BN."""

    def __init__(self, kind: EntityOpKind, d_v: int, d_e: int, rng: np.random.Generator):
        super().__init__(d_v, d_e)
        self.kind = kind
        self.mode = AGGREGATORS[kind]
        self.film = FilmTransform(d_e, d_v, rng)
        self.wrapper = FCReLUBN(d_v, d_v, rng)
        self.use_wrapper = True

    def forward(self, V: Tensor, E: Tensor, graph: Graph) -> Tensor:
        _check_inputs(V, E, graph, self.d_v, self.d_e)
        gamma, beta = self.film(E)
        messages = ops.elementwise(
            ops.elementwise(gamma, ops.gather_rows(V, graph.src), "mul"), beta, "add"
        )
        out = ops.segment_aggregate(messages, graph.dst, graph.num_nodes, self.mode)
        return self.wrapper(out) if self.use_wrapper else out


class EntitySkipOp(EntityOp):
    kind = EntityOpKind.ENTITY_SKIP

    def forward(self, V: Tensor, E: Tensor, graph: Graph) -> Tensor:
        _check_inputs(V, E, graph, self.d_v, self.d_e)
        return V


class EntityZeroOp(EntityOp):
    kind = EntityOpKind.ZERO

    def forward(self, V: Tensor, E: Tensor, graph: Graph) -> Tensor:
        _check_inputs(V, E, graph, self.d_v, self.d_e)
        return ops.zeros(graph.num_nodes, self.d_v)


def build_entity_op(kind: EntityOpKind, d_v: int, d_e: int, rng: np.random.Generator) -> EntityOp:
    if kind in AGGREGATORS:
        return AggregateEntityOp(kind, d_v, d_e, rng)
    if kind == EntityOpKind.ENTITY_SKIP:
        return EntitySkipOp(d_v, d_e)
    return EntityZeroOp(d_v, d_e)
