"""Heuristic reference scores for the synthetic tasks."""

import logging

from ..exceptions import DataError
from ..graphdata.graph import Graph
from ..network.metrics import binary_f1

logger = logging.getLogger(__name__)


def nearest_edge_pairs(graph: Graph, k: int) -> set[tuple[int, int]]:
    """Unordered pairs among the k - 1 shortest incident edges of any node.

    The first edge feature is the edge length; ties go to the lower neighbor id.
    """
    if graph.edge_dim < 1:
        raise DataError("The nearest-edge heuristic needs edge lengths as the first feature")
    length: dict[tuple[int, int], float] = {}
    for (s, d), value in zip(graph.edges.tolist(), graph.edge_features[:, 0], strict=True):
        if s != d:
            length[(min(s, d), max(s, d))] = float(value)

    incident: dict[int, list[tuple[float, int]]] = {}
    for (a, b), value in length.items():
        incident.setdefault(a, []).append((value, b))
        incident.setdefault(b, []).append((value, a))

    positive = set()
    for node, neighbors in incident.items():
        for _, other in sorted(neighbors)[: max(k - 1, 0)]:
            positive.add((min(node, other), max(node, other)))
    return positive


def nearest_edge_f1(graphs: list[Graph], k: int = 3) -> float:
    """Binary F1 of the "k - 1 shortest incident edges are on the tour" heuristic."""
    tp = fp = fn = 0
    for graph in graphs:
        if graph.edge_labels is None:
            raise DataError("Graphs need edge labels to score the heuristic")
        positive = nearest_edge_pairs(graph, k)
        labels = {}
        for (s, d), label in zip(graph.edges.tolist(), graph.edge_labels.tolist(), strict=True):
            labels[(min(s, d), max(s, d))] = int(label)
        for pair, label in labels.items():
            predicted = pair in positive
            tp += int(predicted and label == 1)
            fp += int(predicted and label != 1)
            fn += int(not predicted and label == 1)
    score = binary_f1(tp, fp, fn)
    logger.info(f"Nearest-edge heuristic (k={k}): F1={score:.4f} over {len(graphs)} graphs")
    return score
