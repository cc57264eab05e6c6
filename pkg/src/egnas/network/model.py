"""The stacked-cell network, as a supernet or as a derived architecture."""

import logging

import numpy as np

from ..autodiff.module import Module
from ..autodiff.tensor import Tensor
from ..exceptions import GenotypeError
from ..graphdata.graph import GraphBatch
from ..search.alphas import Alphas
from ..searchspace.cell import Cell
from ..searchspace.embedding import EdgeInit, NodeInit
from ..searchspace.genotype import CellTopology, Genotype
from .heads import build_head
from .task import NetworkConfig

logger = logging.getLogger(__name__)


class Network(Module):
    """Embeddings, ``num_cells`` cells and a task head.

    Without a genotype the network is the search supernet and owns an
    :class:`Alphas` instance (kept outside the weight parameters); with a
    genotype every cell holds only its chosen operations.
    """

    def __init__(
        self,
        config: NetworkConfig,
        node_in_dim: int,
        edge_in_dim: int,
        seed: int = 0,
        genotype: Genotype | None = None,
    ):
        self.config = config
        self.genotype = genotype
        rng = np.random.default_rng(seed)
        d_v, d_e = config.d_v, config.d_e

        if genotype is not None:
            genotype.validate()
            if genotype.num_cells != config.num_cells or genotype.num_nodes != config.num_nodes:
                raise GenotypeError(
                    f"Genotype has {genotype.num_cells} cells of {genotype.num_nodes} nodes, "
                    f"network expects {config.num_cells} of {config.num_nodes}"
                )
            if (genotype.d_v, genotype.d_e) != (d_v, d_e):
                raise GenotypeError(
                    f"Genotype widths ({genotype.d_v}, {genotype.d_e}) differ from "
                    f"network widths ({d_v}, {d_e})"
                )

        topology = CellTopology(config.num_nodes)
        self.node_init = NodeInit(node_in_dim, d_v, rng)
        self.edge_init = EdgeInit(edge_in_dim, d_e, rng)
        self.cells = [
            Cell(
                topology,
                d_v,
                d_e,
                rng,
                genotype=None if genotype is None else genotype.cells[c],
                dropout=config.dropout,
            )
            for c in range(config.num_cells)
        ]
        self.head = build_head(config.task.level, d_v, d_e, config.task.num_classes, rng)
        self.alphas = Alphas(config.num_cells, topology) if genotype is None else None

        kind = "supernet" if genotype is None else "derived network"
        logger.debug(f"Built {kind} with {self.num_parameters()} weights")

    @property
    def is_supernet(self) -> bool:
        return self.genotype is None

    def forward(self, batch: GraphBatch) -> Tensor:
        graph = batch.graph
        V = self.node_init(graph)
        E = self.edge_init(graph)
        for c, cell in enumerate(self.cells):
            alphas = self.alphas.cells[c] if self.is_supernet else None
            V, E = cell(V, E, graph, alphas)
        return self.head(V, E, batch)
