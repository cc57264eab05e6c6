"""Per-cell topology statistics of a genotype."""

import csv
import io
import logging
from dataclasses import astuple, dataclass, fields

import networkx as nx

from ..searchspace.genotype import SKIP_OPS, Genotype

logger = logging.getLogger(__name__)


@dataclass
class CellStats:
    cell: int
    entity_longest_path: int
    edge_longest_path: int
    entity_skips: int
    edge_skips: int
    entity_from_input: int
    edge_from_input: int


def longest_path(edges: list[tuple[int, int]]) -> int:
    """Number of edges on the longest path of a DAG (0 when there are no edges)."""
    dag = nx.DiGraph()
    dag.add_edges_from(edges)
    return nx.dag_longest_path_length(dag) if dag.number_of_edges() else 0


def cell_stats(genotype: Genotype) -> list[CellStats]:
    rows = []
    for c, cell in enumerate(genotype.cells):
        rows.append(
            CellStats(
                cell=c,
                entity_longest_path=longest_path([(s, d) for s, d, _ in cell.entity]),
                edge_longest_path=longest_path([(s, d) for s, d, _ in cell.edge]),
                entity_skips=sum(op in SKIP_OPS for _, _, op in cell.entity),
                edge_skips=sum(op in SKIP_OPS for _, _, op in cell.edge),
                entity_from_input=sum(s == 0 for s, _, _ in cell.entity),
                edge_from_input=sum(s == 0 for s, _, _ in cell.edge),
            )
        )
    return rows


def stats_csv(rows: list[CellStats]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f.name for f in fields(CellStats)])
    for row in rows:
        writer.writerow(astuple(row))
    return buffer.getvalue()
