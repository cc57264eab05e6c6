"""Connected random graphs with typed edges for graph-level tasks."""

import logging
from typing import Any

import networkx as nx
import numpy as np

from ...exceptions import DataError
from ..graph import Graph
from .base import BaseGenerator, nx_seed

logger = logging.getLogger(__name__)

NUM_EDGE_TYPES = 3
MAX_TRIES = 1000


def triangles_in(g: nx.Graph) -> int:
    return sum(nx.triangles(g).values()) // 3


def count_triangles(graph: Graph) -> int:
    """Number of triangles of the undirected graph underlying ``graph``."""
    g = nx.Graph()
    g.add_nodes_from(range(graph.num_nodes))
    g.add_edges_from(graph.edges.tolist())
    return triangles_in(g)


def count_type_zero_edges(graph: Graph) -> int:
    """Undirected edges whose one-hot type is 0."""
    pairs = {
        (min(s, d), max(s, d))
        for (s, d), feat in zip(graph.edges.tolist(), graph.edge_features, strict=True)
        if feat[0] == 1.0
    }
    return len(pairs)


def graphreg_target(graph: Graph) -> float:
    """Triangle count plus half the number of type-0 edges."""
    return count_triangles(graph) + 0.5 * count_type_zero_edges(graph)


class RandomGraphGenerator(BaseGenerator):
    """Erdos-Renyi graphs conditioned on connectivity.

    Node features are a one-hot encoding of the degree (width ``max size``);
    edge features are a one-hot edge type out of three, shared by both
    directions of an undirected edge. Subclasses define the label from the
    sampled graph and its symmetric edge-type matrix.
    """

    kind = "random"

    def __init__(self, size_range: tuple[int, int] = (8, 16), edge_prob: float = 0.3):
        lo, hi = (int(v) for v in size_range)
        if not 1 <= lo <= hi:
            raise DataError(f"size_range must satisfy 1 <= lo <= hi, got {size_range}")
        if not 0.0 < edge_prob <= 1.0:
            raise DataError(f"edge_prob must be in (0, 1], got {edge_prob}")
        self.size_range = (lo, hi)
        self.edge_prob = edge_prob

    def params(self) -> dict[str, Any]:
        return {"size_range": list(self.size_range), "edge_prob": self.edge_prob}

    def label(self, g: nx.Graph, types: np.ndarray) -> float | int:
        raise NotImplementedError("Subclasses must implement label method")

    def _connected_graph(self, rng: np.random.Generator) -> nx.Graph:
        lo, hi = self.size_range
        n = int(rng.integers(lo, hi + 1))
        for _ in range(MAX_TRIES):
            g = nx.gnp_random_graph(n, self.edge_prob, seed=nx_seed(rng))
            if nx.is_connected(g):
                return g
        raise DataError(
            f"No connected graph of {n} nodes after {MAX_TRIES} draws at edge_prob={self.edge_prob}"
        )

    def generate_one(self, rng: np.random.Generator) -> Graph:
        g = self._connected_graph(rng)
        n = g.number_of_nodes()
        adj = nx.to_numpy_array(g, nodelist=range(n)) > 0
        types = np.triu(rng.integers(0, NUM_EDGE_TYPES, size=(n, n)), k=1)
        types = types + types.T

        edges = np.argwhere(adj)
        degree = adj.sum(axis=1)
        x = np.zeros((n, self.size_range[1]))
        x[np.arange(n), degree] = 1.0
        e = np.zeros((len(edges), NUM_EDGE_TYPES))
        e[np.arange(len(edges)), types[edges[:, 0], edges[:, 1]]] = 1.0

        return Graph(
            num_nodes=n,
            edges=edges,
            node_features=x,
            edge_features=e,
            graph_label=self.label(g, types),
        )


class GraphRegressionGenerator(RandomGraphGenerator):
    """Target = triangles + 0.5 x (type-0 edges): needs structure and edge features."""

    kind = "graphreg"

    def label(self, g: nx.Graph, types: np.ndarray) -> float:
        type_zero = sum(1 for u, v in g.edges() if types[u, v] == 0)
        return float(triangles_in(g) + 0.5 * type_zero)


class GraphClassificationGenerator(RandomGraphGenerator):
    """Binary label: 1 if the graph contains a triangle."""

    kind = "graphcls"

    def label(self, g: nx.Graph, types: np.ndarray) -> int:
        return int(triangles_in(g) > 0)


def gen_graphreg(
    num_graphs: int,
    size_range: tuple[int, int],
    seed: int,
    edge_prob: float = 0.3,
) -> list[Graph]:
    """Graph-level regression dataset."""
    return GraphRegressionGenerator(size_range, edge_prob).generate(num_graphs, seed)


def gen_graphcls(
    num_graphs: int,
    size_range: tuple[int, int],
    seed: int,
    edge_prob: float = 0.3,
) -> list[Graph]:
    """Graph-level binary classification dataset."""
    return GraphClassificationGenerator(size_range, edge_prob).generate(num_graphs, seed)
