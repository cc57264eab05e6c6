"""Graph and genotype builders shared by several test modules."""

import numpy as np

from egnas.graphdata.graph import Graph
from egnas.searchspace.genotype import CellGenotype, EdgeOpKind, EntityOpKind, Genotype

DEFAULT_PAIRS = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 4)]


def undirected(pairs: list[tuple[int, int]]) -> np.ndarray:
    """Both directions of every pair."""
    edges = [(s, d) for a, b in pairs for s, d in ((a, b), (b, a))]
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def make_graph(
    rng: np.random.Generator,
    num_nodes: int = 5,
    pairs: list[tuple[int, int]] | None = None,
    node_dim: int = 3,
    edge_dim: int = 2,
    **labels,
) -> Graph:
    if pairs is None:
        pairs = [(a, b) for a, b in DEFAULT_PAIRS if max(a, b) < num_nodes]
    edges = undirected(pairs)
    return Graph(
        num_nodes=num_nodes,
        edges=edges,
        node_features=rng.normal(size=(num_nodes, node_dim)),
        edge_features=rng.normal(size=(len(edges), edge_dim)),
        **labels,
    )


def permute_graph(graph: Graph, perm: np.ndarray) -> Graph:
    """Relabel node i as perm[i]; edge order is kept."""
    inverse = np.argsort(perm)
    return Graph(
        num_nodes=graph.num_nodes,
        edges=perm[graph.edges],
        node_features=graph.node_features[inverse],
        edge_features=graph.edge_features,
        node_labels=None if graph.node_labels is None else graph.node_labels[inverse],
        edge_labels=graph.edge_labels,
        graph_label=graph.graph_label,
    )


def baseline_cell() -> CellGenotype:
    """Four-node cell using every non-Zero op somewhere."""
    return CellGenotype(
        entity=[
            (0, 1, EntityOpKind.SUM),
            (0, 2, EntityOpKind.MEAN),
            (1, 2, EntityOpKind.ENTITY_SKIP),
            (1, 3, EntityOpKind.MAX),
            (2, 4, EntityOpKind.SUM),
            (3, 4, EntityOpKind.ENTITY_SKIP),
        ],
        edge=[
            (0, 1, EdgeOpKind.CONCAT),
            (0, 2, EdgeOpKind.GRU),
            (1, 3, EdgeOpKind.FILM),
            (2, 3, EdgeOpKind.EDGE_SKIP),
            (0, 4, EdgeOpKind.CONCAT),
        ],
    )


def baseline_genotype(num_cells: int = 2, d: int = 4) -> Genotype:
    return Genotype(cells=[baseline_cell() for _ in range(num_cells)], d_v=d, d_e=d)


def skip_genotype(num_cells: int = 1, num_nodes: int = 4, d: int = 4) -> Genotype:
    """Chain cells where every node copies its predecessor through a skip op."""
    cell = CellGenotype(
        entity=[(j - 1, j, EntityOpKind.ENTITY_SKIP) for j in range(1, num_nodes + 1)],
        edge=[(j - 1, j, EdgeOpKind.EDGE_SKIP) for j in range(1, num_nodes + 1)],
    )
    return Genotype(cells=[cell] * num_cells, d_v=d, d_e=d)
