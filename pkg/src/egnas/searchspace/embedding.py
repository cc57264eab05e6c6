"""Input embeddings, including the E_0 initialization of edge features."""

import numpy as np

from ..autodiff.module import Linear, Module
from ..autodiff.tensor import Tensor
from ..graphdata.graph import Graph


def e0_init(graph: Graph) -> Tensor:
    """Edge input before embedding: the provided edge features, or an
    all-ones single column when the dataset has none."""
    if graph.edge_dim == 0:
        return Tensor(np.ones((graph.num_edges, 1)))
    return Tensor(graph.edge_features)


class EdgeInit(Module):
    """Embeds :func:`e0_init` to the hidden edge width ``d_e``."""

    def __init__(self, edge_in_dim: int, d_e: int, rng: np.random.Generator):
        self.embed = Linear(max(edge_in_dim, 1), d_e, rng)

    def forward(self, graph: Graph) -> Tensor:
        return self.embed(e0_init(graph))


class NodeInit(Module):
    """Embeds the raw entity features to the hidden width ``d_v``."""

    def __init__(self, node_in_dim: int, d_v: int, rng: np.random.Generator):
        self.embed = Linear(max(node_in_dim, 1), d_v, rng)

    def forward(self, graph: Graph) -> Tensor:
        x = graph.node_features
        if x.shape[1] == 0:
            x = np.ones((graph.num_nodes, 1))
        return self.embed(Tensor(x))
