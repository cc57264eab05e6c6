"""The searchable cell: dual entity-updating and edge-updating DAGs."""

import logging

import numpy as np

from ..autodiff import ops
from ..autodiff.module import Dropout, Linear, Module
from ..autodiff.tensor import Tensor
from ..exceptions import GenotypeError, ShapeError
from ..graphdata.graph import Graph
from .edge_ops import build_edge_op
from .entity_ops import build_entity_op
from .genotype import CellGenotype, CellTopology
from .mixed import mixed_edge_op, mixed_entity_op

logger = logging.getLogger(__name__)

# alphas[dag][(i, j)] -> 1 x 5 tensor, dag in {"entity", "edge"}
CellAlphas = dict[str, dict[tuple[int, int], Tensor]]


def edge_key(i: int, j: int) -> str:
    return f"{i}_{j}"


class Cell(Module):
    """One cell computing V_j = sum_i op_V(i,j)(V_i, E_i) and
    E_j = sum_i op_E(i,j)(E_i, V_i) for j = 1..N.

    The N intermediate nodes of each DAG are concatenated, projected back to
    the hidden width, passed through dropout, and added to the cell input.

    A cell built without a genotype is a supernet cell holding a mixed op on
    every candidate edge; with a genotype it holds only the chosen ops.
    """

    def __init__(
        self,
        topology: CellTopology,
        d_v: int,
        d_e: int,
        rng: np.random.Generator,
        genotype: CellGenotype | None = None,
        dropout: float = 0.0,
    ):
        self.topology = topology
        self.d_v = d_v
        self.d_e = d_e
        self.genotype = genotype
        n = topology.num_nodes

        if genotype is None:
            self.entity_ops = {
                edge_key(i, j): mixed_entity_op(d_v, d_e, rng) for i, j in topology.candidate_edges
            }
            self.edge_ops = {
                edge_key(i, j): mixed_edge_op(d_v, d_e, rng) for i, j in topology.candidate_edges
            }
        else:
            if genotype.num_nodes != n:
                raise GenotypeError(
                    f"Cell genotype has {genotype.num_nodes} nodes, topology expects {n}"
                )
            self.entity_ops = {
                edge_key(i, j): build_entity_op(op, d_v, d_e, rng) for i, j, op in genotype.entity
            }
            self.edge_ops = {
                edge_key(i, j): build_edge_op(op, d_v, d_e, rng) for i, j, op in genotype.edge
            }

        self.proj_v = Linear(n * d_v, d_v, rng)
        self.proj_e = Linear(n * d_e, d_e, rng)
        self.dropout_v = Dropout(dropout, rng)
        self.dropout_e = Dropout(dropout, rng)

    @property
    def is_supernet(self) -> bool:
        return self.genotype is None

    def _incoming(self, dag: str, j: int) -> list[int]:
        if self.genotype is None:
            return self.topology.incoming(j)
        return [src for src, dst, _ in self.genotype.dag(dag) if dst == j]

    def forward(
        self,
        V0: Tensor,
        E0: Tensor,
        graph: Graph,
        alphas: CellAlphas | None = None,
    ) -> tuple[Tensor, Tensor]:
        """Run both DAGs and return the (V_out, E_out) pair.

        Raises:
            ShapeError: If a supernet cell is called without alphas
        """
        if self.is_supernet and alphas is None:
            raise ShapeError("A supernet cell needs architecture weights")
        V = [V0]
        E = [E0]
        for j in range(1, self.topology.num_nodes + 1):
            v_terms = []
            for i in self._incoming("entity", j):
                op = self.entity_ops[edge_key(i, j)]
                if self.is_supernet:
                    v_terms.append(op(alphas["entity"][(i, j)], V[i], E[i], graph))
                else:
                    v_terms.append(op(V[i], E[i], graph))
            e_terms = []
            for i in self._incoming("edge", j):
                op = self.edge_ops[edge_key(i, j)]
                if self.is_supernet:
                    e_terms.append(op(alphas["edge"][(i, j)], E[i], V[i], graph))
                else:
                    e_terms.append(op(E[i], V[i], graph))
            V.append(_sum(v_terms))
            E.append(_sum(e_terms))

        v_out = self.dropout_v(self.proj_v(ops.concat_many(V[1:])))
        e_out = self.dropout_e(self.proj_e(ops.concat_many(E[1:])))
        return v_out + V0, e_out + E0


def _sum(terms: list[Tensor]) -> Tensor:
    out = terms[0]
    for term in terms[1:]:
        out = out + term
    return out
