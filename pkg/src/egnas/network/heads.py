"""Task-specific output layers."""

import numpy as np

from ..autodiff import ops
from ..autodiff.module import Linear, Module
from ..autodiff.tensor import Tensor
from ..graphdata.graph import GraphBatch


class NodeHead(Module):
    """Per-node logits P_V V_out."""

    def __init__(self, d_v: int, num_classes: int, rng: np.random.Generator):
        self.classifier = Linear(d_v, num_classes, rng)

    def forward(self, V: Tensor, E: Tensor, batch: GraphBatch) -> Tensor:
        return self.classifier(V)


class EdgeHead(Module):
    """Per-edge logits P_E E_out, read from the edge representation alone."""

    def __init__(self, d_e: int, num_classes: int, rng: np.random.Generator):
        self.classifier = Linear(d_e, num_classes, rng)

    def forward(self, V: Tensor, E: Tensor, batch: GraphBatch) -> Tensor:
        return self.classifier(E)


class GraphHead(Module):
    """P_G [mean of node rows || mean of edge rows], one row per graph.

    A graph without edges pools its edge side to the zero row.
    """

    def __init__(self, d_v: int, d_e: int, num_classes: int, rng: np.random.Generator):
        self.classifier = Linear(d_v + d_e, num_classes, rng)

    def pool(self, V: Tensor, E: Tensor, batch: GraphBatch) -> Tensor:
        v_mean = ops.segment_aggregate(V, batch.graph_of_node, batch.num_graphs, "mean")
        e_mean = ops.segment_aggregate(E, batch.graph_of_edge, batch.num_graphs, "mean")
        return ops.concat_cols(v_mean, e_mean)

    def forward(self, V: Tensor, E: Tensor, batch: GraphBatch) -> Tensor:
        return self.classifier(self.pool(V, E, batch))


def build_head(level: str, d_v: int, d_e: int, num_classes: int, rng: np.random.Generator) -> Module:
    if level == "node":
        return NodeHead(d_v, num_classes, rng)
    if level == "edge":
        return EdgeHead(d_e, num_classes, rng)
    return GraphHead(d_v, d_e, num_classes, rng)
