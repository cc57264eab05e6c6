"""Stochastic block model graphs for node classification."""

import logging
from typing import Any

import networkx as nx
import numpy as np

from ...exceptions import DataError
from ..graph import Graph
from .base import BaseGenerator, nx_seed

logger = logging.getLogger(__name__)


class SBMGenerator(BaseGenerator):
    """Community graphs whose node labels are the community ids.

    Node features are width ``num_communities + 1``: uncorrupted nodes carry a
    one-hot community hint, corrupted nodes (probability ``feature_noise``)
    carry only the trailing "unknown" flag. Graphs have no edge features.
    """

    kind = "sbm"

    def __init__(
        self,
        nodes_per_community: int = 10,
        num_communities: int = 2,
        p_intra: float = 0.5,
        p_inter: float = 0.05,
        feature_noise: float = 0.5,
    ):
        if not 0.0 <= p_inter < p_intra <= 1.0:
            raise DataError(
                f"Need 0 <= p_inter < p_intra <= 1, got p_inter={p_inter}, p_intra={p_intra}"
            )
        if nodes_per_community < 1 or num_communities < 1:
            raise DataError("nodes_per_community and num_communities must be positive")
        if not 0.0 <= feature_noise <= 1.0:
            raise DataError(f"feature_noise must be in [0, 1], got {feature_noise}")
        self.nodes_per_community = nodes_per_community
        self.num_communities = num_communities
        self.p_intra = p_intra
        self.p_inter = p_inter
        self.feature_noise = feature_noise

    def params(self) -> dict[str, Any]:
        return {
            "nodes_per_community": self.nodes_per_community,
            "num_communities": self.num_communities,
            "p_intra": self.p_intra,
            "p_inter": self.p_inter,
            "feature_noise": self.feature_noise,
        }

    def generate_one(self, rng: np.random.Generator) -> Graph:
        c = self.num_communities
        n = self.nodes_per_community * c
        probs = [[self.p_intra if a == b else self.p_inter for b in range(c)] for a in range(c)]
        blocks = nx.stochastic_block_model([self.nodes_per_community] * c, probs, seed=nx_seed(rng))

        # networkx numbers nodes block by block; shuffle so community order is not positional
        perm = rng.permutation(n)
        labels = np.empty(n, dtype=np.int64)
        labels[perm] = np.repeat(np.arange(c), self.nodes_per_community)
        g = nx.relabel_nodes(blocks, dict(enumerate(perm.tolist())))
        adj = nx.to_numpy_array(g, nodelist=range(n)) > 0

        x = np.zeros((n, c + 1))
        corrupted = rng.random(n) < self.feature_noise
        known = np.flatnonzero(~corrupted)
        x[known, labels[known]] = 1.0
        x[corrupted, c] = 1.0

        edges = np.argwhere(adj)
        return Graph(
            num_nodes=n,
            edges=edges,
            node_features=x,
            edge_features=np.zeros((len(edges), 0)),
            node_labels=labels,
        )


def gen_sbm(
    num_graphs: int,
    nodes_per_community: int,
    num_communities: int,
    p_intra: float,
    p_inter: float,
    feature_noise: float,
    seed: int,
) -> list[Graph]:
    """Stochastic block model dataset for node-level classification."""
    generator = SBMGenerator(
        nodes_per_community, num_communities, p_intra, p_inter, feature_noise
    )
    return generator.generate(num_graphs, seed)
