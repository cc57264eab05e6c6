"""Edge-updating operations.

Each op updates the relation feature E(s,t) of every edge from its old value
and the temporary relation feature [V(s) || V(t)]. Updates are row-local: an
output row depends only on its own edge's inputs.
"""

import logging

import numpy as np

from ..autodiff import ops
from ..autodiff.module import Linear, Module
from ..autodiff.tensor import Tensor
from ..exceptions import ShapeError
from ..graphdata.graph import Graph
from .genotype import EdgeOpKind
from .layers import FCReLUBN, FilmTransform

logger = logging.getLogger(__name__)


def relation_feature(V: Tensor, graph: Graph) -> Tensor:
    """[V(s) || V(t)] for every edge (s, t)."""
    return ops.concat_cols(ops.gather_rows(V, graph.src), ops.gather_rows(V, graph.dst))


class EdgeOp(Module):
    """Maps (E_i, V_i) on a graph to a new |E| x d_E relation representation."""

    kind: EdgeOpKind

    def __init__(self, d_v: int, d_e: int):
        self.d_v = d_v
        self.d_e = d_e

    def check_inputs(self, E: Tensor, V: Tensor, graph: Graph) -> None:
        if E.shape != (graph.num_edges, self.d_e):
            raise ShapeError(f"Edge features {E.shape}, expected ({graph.num_edges}, {self.d_e})")
        if V.shape != (graph.num_nodes, self.d_v):
            raise ShapeError(f"Entity features {V.shape}, expected ({graph.num_nodes}, {self.d_v})")

    def forward(self, E: Tensor, V: Tensor, graph: Graph) -> Tensor:
        raise NotImplementedError("Subclasses must implement forward method")


class ConcatEdgeOp(EdgeOp):
    """MLP([E || V(s) || V(t)]) followed by FC-ReLU-BN."""

    kind = EdgeOpKind.CONCAT

    def __init__(self, d_v: int, d_e: int, rng: np.random.Generator):
        super().__init__(d_v, d_e)
        self.mlp = Linear(d_e + 2 * d_v, d_e, rng)
        self.wrapper = FCReLUBN(d_e, d_e, rng)
        self.use_wrapper = True

    def forward(self, E: Tensor, V: Tensor, graph: Graph) -> Tensor:
        self.check_inputs(E, V, graph)
        out = self.mlp(ops.concat_cols(E, relation_feature(V, graph)))
        return self.wrapper(out) if self.use_wrapper else out


class GRUEdgeOp(EdgeOp):
    """Gated update of the old relation feature.

        x = ReLU(P_x [V(s) || V(t)])
        r = sigmoid(U_r x + W_r E)
        z = sigmoid(U_z x + W_z E)
        h = tanh(U_h x + W_h (r * E))
        out = (1 - z) * E + z * h

    The wrapper that follows skips ReLU so the convex combination survives.
    """

    kind = EdgeOpKind.GRU

    def __init__(self, d_v: int, d_e: int, rng: np.random.Generator):
        super().__init__(d_v, d_e)
        self.p_x = Linear(2 * d_v, d_e, rng)
        self.u_r = Linear(d_e, d_e, rng)
        self.w_r = Linear(d_e, d_e, rng, bias=False)
        self.u_z = Linear(d_e, d_e, rng)
        self.w_z = Linear(d_e, d_e, rng, bias=False)
        self.u_h = Linear(d_e, d_e, rng)
        self.w_h = Linear(d_e, d_e, rng, bias=False)
        self.wrapper = FCReLUBN(d_e, d_e, rng, relu=False)
        self.use_wrapper = True

    def forward(self, E: Tensor, V: Tensor, graph: Graph) -> Tensor:
        self.check_inputs(E, V, graph)
        x = ops.relu(self.p_x(relation_feature(V, graph)))
        r = ops.sigmoid(self.u_r(x) + self.w_r(E))
        z = ops.sigmoid(self.u_z(x) + self.w_z(E))
        h = ops.tanh(self.u_h(x) + self.w_h(r * E))
        out = ops.one_minus(z) * E + z * h
        return self.wrapper(out) if self.use_wrapper else out


class FilmEdgeOp(EdgeOp):
    """gamma * E + beta with (gamma, beta) computed from [V(s) || V(t)], then FC-ReLU-BN."""

    kind = EdgeOpKind.FILM

    def __init__(self, d_v: int, d_e: int, rng: np.random.Generator):
        super().__init__(d_v, d_e)
        self.film = FilmTransform(2 * d_v, d_e, rng)
        self.wrapper = FCReLUBN(d_e, d_e, rng)
        self.use_wrapper = True

    def forward(self, E: Tensor, V: Tensor, graph: Graph) -> Tensor:
        self.check_inputs(E, V, graph)
        gamma, beta = self.film(relation_feature(V, graph))
        out = gamma * E + beta
        return self.wrapper(out) if self.use_wrapper else out


class EdgeSkipOp(EdgeOp):
    kind = EdgeOpKind.EDGE_SKIP

    def forward(self, E: Tensor, V: Tensor, graph: Graph) -> Tensor:
        self.check_inputs(E, V, graph)
        return E


class EdgeZeroOp(EdgeOp):
    kind = EdgeOpKind.ZERO

    def forward(self, E: Tensor, V: Tensor, graph: Graph) -> Tensor:
        self.check_inputs(E, V, graph)
        return ops.zeros(graph.num_edges, self.d_e)


def build_edge_op(kind: EdgeOpKind, d_v: int, d_e: int, rng: np.random.Generator) -> EdgeOp:
    if kind == EdgeOpKind.CONCAT:
        return ConcatEdgeOp(d_v, d_e, rng)
    if kind == EdgeOpKind.GRU:
        return GRUEdgeOp(d_v, d_e, rng)
    if kind == EdgeOpKind.FILM:
        return FilmEdgeOp(d_v, d_e, rng)
    if kind == EdgeOpKind.EDGE_SKIP:
        return EdgeSkipOp(d_v, d_e)
    return EdgeZeroOp(d_v, d_e)
