"""JSONL persistence for graph datasets.

One JSON object per line per graph::

    {"n": 3, "edges": [[0, 1], [1, 0]], "x": [[...], ...], "e": [[...], ...],
     "y_node": [...]}      # or "y_edge": [...] / "y_graph": value

Floats are written with ``repr`` precision, so ``load_jsonl(save_jsonl(d))``
reproduces the dataset exactly.
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from ..exceptions import DataError
from .graph import Graph

logger = logging.getLogger(__name__)


def graph_to_dict(graph: Graph) -> dict[str, Any]:
    record: dict[str, Any] = {
        "n": graph.num_nodes,
        "edges": graph.edges.tolist(),
        "x": graph.node_features.tolist(),
        "e": graph.edge_features.tolist(),
    }
    if graph.node_labels is not None:
        record["y_node"] = graph.node_labels.tolist()
    if graph.edge_labels is not None:
        record["y_edge"] = graph.edge_labels.tolist()
    if graph.graph_label is not None:
        record["y_graph"] = graph.graph_label
    return record


def graph_from_dict(record: dict[str, Any]) -> Graph:
    """Build a Graph from one decoded JSONL record.

    Raises:
        DataError: If required keys are missing or values are inconsistent
    """
    missing = [key for key in ("n", "edges", "x", "e") if key not in record]
    if missing:
        raise DataError(f"Record is missing keys: {missing}")
    y_node = record.get("y_node")
    y_edge = record.get("y_edge")
    return Graph(
        num_nodes=int(record["n"]),
        edges=np.asarray(record["edges"], dtype=np.int64).reshape(-1, 2),
        node_features=np.asarray(record["x"], dtype=np.float64),
        edge_features=np.asarray(record["e"], dtype=np.float64),
        node_labels=None if y_node is None else np.asarray(y_node),
        edge_labels=None if y_edge is None else np.asarray(y_edge),
        graph_label=record.get("y_graph"),
    )


def save_jsonl(graphs: list[Graph], path: str | Path) -> None:
    """Write a dataset, one graph per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for graph in graphs:
            f.write(json.dumps(graph_to_dict(graph), separators=(",", ":")))
            f.write("\n")
    logger.info(f"Wrote {len(graphs)} graphs to {path}")


def load_jsonl(path: str | Path) -> list[Graph]:
    """Read a dataset written by :func:`save_jsonl`.

    Raises:
        FileNotFoundError: If ``path`` does not exist
        DataError: If a line is not valid JSON or not a valid graph record
    """
    path = Path(path)
    graphs = []
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{line_no}: malformed JSON ({e.msg})") from e
            if not isinstance(record, dict):
                raise DataError(f"{path}:{line_no}: expected a JSON object")
            try:
                graphs.append(graph_from_dict(record))
            except (DataError, ValueError, TypeError) as e:
                raise DataError(f"{path}:{line_no}: {e}") from e
    logger.info(f"Loaded {len(graphs)} graphs from {path}")
    return graphs
