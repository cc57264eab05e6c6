"""Discrete architecture derivation from continuous alphas."""

import logging
from functools import cmp_to_key

import numpy as np

from ..searchspace.genotype import (
    EDGE_OPS,
    ENTITY_OPS,
    MAX_INCOMING,
    CellGenotype,
    EdgeOpKind,
    EntityOpKind,
    Genotype,
)
from .alphas import DAGS, Alphas

logger = logging.getLogger(__name__)

# Softmax weights this close count as tied; shifting an alpha vector moves them by rounding only.
WEIGHT_RTOL = 1e-9
WEIGHT_ATOL = 1e-12


def _softmax(row: np.ndarray) -> np.ndarray:
    exp = np.exp(row - row.max())
    return exp / exp.sum()


def best_op(row: np.ndarray, kinds: tuple) -> tuple[int, float]:
    """Index of the strongest non-Zero op (ties -> lowest index) and its softmax weight."""
    weights = _softmax(row)
    best = -1
    for k, kind in enumerate(kinds):
        if kind in (EntityOpKind.ZERO, EdgeOpKind.ZERO):
            continue
        if best < 0 or row[k] > row[best]:
            best = k
    return best, float(weights[best])


def stronger_first(a: tuple[float, int], b: tuple[float, int]) -> int:
    """Comparator on (weight, src): heavier first, close weights fall back to the lower src."""
    (wa, ia), (wb, ib) = a, b
    if np.isclose(wa, wb, rtol=WEIGHT_RTOL, atol=WEIGHT_ATOL):
        return ia - ib
    return -1 if wa > wb else 1


def derive(alphas: Alphas, d_v: int, d_e: int) -> Genotype:
    """Replace each mixed op by its most likely non-Zero op and keep at most
    two incoming edges per node.

    Incoming edges are ranked by the softmax weight of their chosen op; weights
    equal up to rounding count as ties, which go to the lower source index. Every node keeps at least one edge.
    """
    kinds_of = {"entity": ENTITY_OPS, "edge": EDGE_OPS}
    cells = []
    for cell_alphas in alphas.cells:
        chosen: dict[str, list] = {}
        for dag in DAGS:
            kinds = kinds_of[dag]
            choices = []
            for j in range(1, alphas.topology.num_nodes + 1):
                ranked = []
                for i in alphas.topology.incoming(j):
                    k, weight = best_op(cell_alphas[dag][(i, j)].data[0], kinds)
                    ranked.append((weight, i, kinds[k]))
                ranked.sort(key=cmp_to_key(lambda a, b: stronger_first(a[:2], b[:2])))
                kept = sorted(ranked[:MAX_INCOMING], key=lambda r: r[1])
                choices.extend((i, j, kind) for _, i, kind in kept)
            chosen[dag] = choices
        cells.append(CellGenotype(entity=chosen["entity"], edge=chosen["edge"]))
    genotype = Genotype(cells=cells, d_v=d_v, d_e=d_e)
    genotype.validate()
    return genotype
