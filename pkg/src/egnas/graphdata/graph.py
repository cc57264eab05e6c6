"""Graph values and disjoint-union batching."""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..exceptions import DataError

logger = logging.getLogger(__name__)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """A directed graph with entity and edge features plus optional labels.

    Undirected data is stored with both directions of every edge, so the
    neighborhood of a node is exactly its set of in-edges.

    Attributes:
        num_nodes: Number of entities
        edges: (num_edges, 2) int array of (src, dst) pairs
        node_features: (num_nodes, d_in_V) float array
        edge_features: (num_edges, d_in_E) float array, d_in_E may be 0
        node_labels: Optional per-node integer classes
        edge_labels: Optional per-edge integer classes
        graph_label: Optional graph class (int) or regression target (float)
    """

    num_nodes: int
    edges: np.ndarray
    node_features: np.ndarray
    edge_features: np.ndarray
    node_labels: np.ndarray | None = None
    edge_labels: np.ndarray | None = None
    graph_label: float | int | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        x = np.asarray(self.node_features, dtype=np.float64)
        e = np.asarray(self.edge_features, dtype=np.float64)
        if x.ndim != 2:
            x = x.reshape(self.num_nodes, -1) if x.size else np.zeros((self.num_nodes, 0))
        if e.ndim != 2:
            e = e.reshape(len(edges), -1) if e.size else np.zeros((len(edges), 0))
        object.__setattr__(self, "edges", _freeze(edges))
        object.__setattr__(self, "node_features", _freeze(x))
        object.__setattr__(self, "edge_features", _freeze(e))
        for name in ("node_labels", "edge_labels"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _freeze(np.asarray(value).reshape(-1)))
        self.validate()

    def validate(self) -> None:
        """Check the structural invariants.

        Raises:
            DataError: If endpoints, feature rows or label lengths are inconsistent
        """
        if self.num_nodes < 0:
            raise DataError(f"num_nodes must be non-negative, got {self.num_nodes}")
        if len(self.edges) and (self.edges.min() < 0 or self.edges.max() >= self.num_nodes):
            raise DataError(f"Edge endpoint out of range for a graph of {self.num_nodes} nodes")
        if self.node_features.shape[0] != self.num_nodes:
            raise DataError(
                f"{self.node_features.shape[0]} node feature rows for {self.num_nodes} nodes"
            )
        if self.edge_features.shape[0] != self.num_edges:
            raise DataError(
                f"{self.edge_features.shape[0]} edge feature rows for {self.num_edges} edges"
            )
        if self.node_labels is not None and len(self.node_labels) != self.num_nodes:
            raise DataError("node_labels length differs from num_nodes")
        if self.edge_labels is not None and len(self.edge_labels) != self.num_edges:
            raise DataError("edge_labels length differs from num_edges")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def node_dim(self) -> int:
        return self.node_features.shape[1]

    @property
    def edge_dim(self) -> int:
        return self.edge_features.shape[1]

    @cached_property
    def src(self) -> np.ndarray:
        return self.edges[:, 0]

    @cached_property
    def dst(self) -> np.ndarray:
        return self.edges[:, 1]

    def is_symmetric(self) -> bool:
        """True if the edge list is closed under reversal."""
        pairs = {tuple(e) for e in self.edges.tolist()}
        return all((d, s) in pairs for s, d in pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.edges, other.edges)
            and self.node_features.shape == other.node_features.shape
            and np.array_equal(self.node_features, other.node_features)
            and self.edge_features.shape == other.edge_features.shape
            and np.array_equal(self.edge_features, other.edge_features)
            and _labels_equal(self.node_labels, other.node_labels)
            and _labels_equal(self.edge_labels, other.edge_labels)
            and self.graph_label == other.graph_label
        )

    __hash__ = None


def _labels_equal(a: np.ndarray | None, b: np.ndarray | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


@dataclass(frozen=True, eq=False)
class GraphBatch:
    """Disjoint union of several graphs with per-row segment ids.

    Attributes:
        graph: The merged graph (indices offset per constituent)
        graph_of_node: Graph id of every merged node
        graph_of_edge: Graph id of every merged edge
        num_graphs: Number of constituent graphs
        node_offsets: Start of each graph's nodes (length num_graphs + 1)
        edge_offsets: Start of each graph's edges (length num_graphs + 1)
        graph_labels: Per-graph labels, when every graph carries one
    """

    graph: Graph
    graph_of_node: np.ndarray
    graph_of_edge: np.ndarray
    num_graphs: int
    node_offsets: np.ndarray
    edge_offsets: np.ndarray
    graph_labels: np.ndarray | None = field(default=None)


def _common_width(blocks: list[np.ndarray], what: str) -> int:
    widths = {b.shape[1] for b in blocks if b.shape[0] > 0}
    if len(widths) > 1:
        raise DataError(f"Graphs in a batch have different {what} widths: {sorted(widths)}")
    if widths:
        return widths.pop()
    return max((b.shape[1] for b in blocks), default=0)


def _concat_labels(graphs: list[Graph], name: str) -> np.ndarray | None:
    values = [getattr(g, name) for g in graphs]
    if any(v is None for v in values):
        return None
    return np.concatenate(values) if values else np.zeros(0, dtype=np.int64)


def batch(graphs: list[Graph]) -> GraphBatch:
    """Merge graphs into one disjoint union.

    Raises:
        DataError: If the graphs disagree on feature widths or the list is empty
    """
    if not graphs:
        raise DataError("Cannot batch an empty list of graphs")
    node_dim = _common_width([g.node_features for g in graphs], "node feature")
    edge_dim = _common_width([g.edge_features for g in graphs], "edge feature")

    node_counts = np.array([g.num_nodes for g in graphs], dtype=np.int64)
    edge_counts = np.array([g.num_edges for g in graphs], dtype=np.int64)
    node_offsets = np.concatenate([[0], np.cumsum(node_counts)])
    edge_offsets = np.concatenate([[0], np.cumsum(edge_counts)])

    edges = np.concatenate(
        [g.edges + node_offsets[i] for i, g in enumerate(graphs)]
    ).reshape(-1, 2)
    x = np.concatenate([g.node_features.reshape(g.num_nodes, node_dim) for g in graphs])
    e = np.concatenate([g.edge_features.reshape(g.num_edges, edge_dim) for g in graphs])

    labels = [g.graph_label for g in graphs]
    graph_labels = None if any(v is None for v in labels) else np.asarray(labels)

    merged = Graph(
        num_nodes=int(node_offsets[-1]),
        edges=edges,
        node_features=x,
        edge_features=e,
        node_labels=_concat_labels(graphs, "node_labels"),
        edge_labels=_concat_labels(graphs, "edge_labels"),
    )
    return GraphBatch(
        graph=merged,
        graph_of_node=np.repeat(np.arange(len(graphs)), node_counts),
        graph_of_edge=np.repeat(np.arange(len(graphs)), edge_counts),
        num_graphs=len(graphs),
        node_offsets=node_offsets,
        edge_offsets=edge_offsets,
        graph_labels=graph_labels,
    )


def unbatch(merged: GraphBatch) -> list[Graph]:
    """Split a batch back into its constituent graphs."""
    g = merged.graph
    graphs = []
    for i in range(merged.num_graphs):
        n0, n1 = merged.node_offsets[i], merged.node_offsets[i + 1]
        e0, e1 = merged.edge_offsets[i], merged.edge_offsets[i + 1]
        graphs.append(
            Graph(
                num_nodes=int(n1 - n0),
                edges=g.edges[e0:e1] - n0,
                node_features=g.node_features[n0:n1],
                edge_features=g.edge_features[e0:e1],
                node_labels=None if g.node_labels is None else g.node_labels[n0:n1],
                edge_labels=None if g.edge_labels is None else g.edge_labels[e0:e1],
                graph_label=None
                if merged.graph_labels is None
                else merged.graph_labels[i].item(),
            )
        )
    return graphs
