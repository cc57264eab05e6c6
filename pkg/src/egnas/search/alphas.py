"""Continuous architecture parameters of the supernet."""

import logging

import numpy as np

from ..autodiff.tensor import Tensor
from ..searchspace.cell import CellAlphas
from ..searchspace.genotype import EDGE_OPS, ENTITY_OPS, CellTopology

logger = logging.getLogger(__name__)

DAGS = ("entity", "edge")


class Alphas:
    """One learnable 1 x 5 row per candidate DAG edge, per DAG, per cell.

    Entity rows index :data:`ENTITY_OPS`, edge rows index :data:`EDGE_OPS`.
    All rows start at zero (uniform softmax).
    """

    def __init__(self, num_cells: int, topology: CellTopology):
        self.num_cells = num_cells
        self.topology = topology
        widths = {"entity": len(ENTITY_OPS), "edge": len(EDGE_OPS)}
        self.cells: list[CellAlphas] = [
            {
                dag: {
                    pair: Tensor(np.zeros((1, widths[dag])), requires_grad=True)
                    for pair in topology.candidate_edges
                }
                for dag in DAGS
            }
            for _ in range(num_cells)
        ]

    def __len__(self) -> int:
        return sum(len(cell[dag]) for cell in self.cells for dag in DAGS)

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [
            (f"alphas.{c}.{dag}.{i}_{j}", tensor)
            for c, cell in enumerate(self.cells)
            for dag in DAGS
            for (i, j), tensor in cell[dag].items()
        ]

    def parameters(self) -> list[Tensor]:
        return [tensor for _, tensor in self.named_parameters()]

    def zero_grad(self) -> None:
        for tensor in self.parameters():
            tensor.zero_grad()

    def snapshot(self) -> list[dict[str, dict[str, list[float]]]]:
        """Plain-list copy of every row, for logging the trajectory."""
        return [
            {
                dag: {f"{i}_{j}": tensor.data[0].tolist() for (i, j), tensor in cell[dag].items()}
                for dag in DAGS
            }
            for cell in self.cells
        ]

    def set_row(self, cell: int, dag: str, pair: tuple[int, int], values) -> None:
        self.cells[cell][dag][pair].data[0, :] = values
