"""Genotype rewrites for ablation studies."""

import logging
from enum import Enum

import numpy as np

from ..exceptions import GenotypeError
from ..searchspace.genotype import (
    EDGE_OPS,
    ENTITY_OPS,
    MAX_INCOMING,
    CellGenotype,
    EdgeOpKind,
    EntityOpKind,
    Genotype,
    parse_op,
)

logger = logging.getLogger(__name__)


class AblationKind(Enum):
    REPLACE_ENTITY = "replace-entity"
    REPLACE_EDGE = "replace-edge"
    SEQUENTIAL = "sequential"
    RANDOM = "random"


def _replacement(dag: str, op: str | EntityOpKind | EdgeOpKind) -> EntityOpKind | EdgeOpKind:
    kind = parse_op(dag, op) if isinstance(op, str) else op
    valid = ENTITY_OPS if dag == "entity" else EDGE_OPS
    if kind not in valid or kind in (EntityOpKind.ZERO, EdgeOpKind.ZERO):
        raise GenotypeError(f"'{getattr(kind, 'value', kind)}' is not a valid {dag} replacement")
    return kind


def replace_ops(genotype: Genotype, dag: str, op: str | EntityOpKind | EdgeOpKind) -> Genotype:
    """Set every op of one DAG to ``op``; the topology is unchanged.

    Raises:
        GenotypeError: If ``op`` is Zero or not a member of the DAG's op set
    """
    kind = _replacement(dag, op)
    cells = []
    for cell in genotype.cells:
        rewritten = [(s, d, kind) for s, d, _ in cell.dag(dag)]
        if dag == "entity":
            cells.append(CellGenotype(entity=rewritten, edge=list(cell.edge)))
        else:
            cells.append(CellGenotype(entity=list(cell.entity), edge=rewritten))
    return Genotype(cells=cells, d_v=genotype.d_v, d_e=genotype.d_e)


def sequentialize(genotype: Genotype) -> Genotype:
    """Make node j of every edge DAG depend only on node j - 1.

    The op of an existing (j - 1, j) edge is kept; missing ones get Concat.
    Entity DAGs are untouched.
    """
    n = genotype.num_nodes
    cells = []
    for cell in genotype.cells:
        existing = {(s, d): op for s, d, op in cell.edge}
        edge = [(j - 1, j, existing.get((j - 1, j), EdgeOpKind.CONCAT)) for j in range(1, n + 1)]
        cells.append(CellGenotype(entity=list(cell.entity), edge=edge))
    return Genotype(cells=cells, d_v=genotype.d_v, d_e=genotype.d_e)


def random_genotype(
    num_cells: int, num_nodes: int, d_v: int, d_e: int, rng: np.random.Generator
) -> Genotype:
    """Sample a valid genotype: per node 1 or 2 distinct predecessors, ops uniform over non-Zero."""
    choices = {
        "entity": [k for k in ENTITY_OPS if k != EntityOpKind.ZERO],
        "edge": [k for k in EDGE_OPS if k != EdgeOpKind.ZERO],
    }
    cells = []
    for _ in range(num_cells):
        dags = {}
        for dag, ops in choices.items():
            picked = []
            for j in range(1, num_nodes + 1):
                count = int(rng.integers(1, min(MAX_INCOMING, j) + 1))
                sources = sorted(int(s) for s in rng.choice(j, size=count, replace=False))
                picked.extend((s, j, ops[int(rng.integers(len(ops)))]) for s in sources)
            dags[dag] = picked
        cells.append(CellGenotype(entity=dags["entity"], edge=dags["edge"]))
    return Genotype(cells=cells, d_v=d_v, d_e=d_e)


def ablate(
    genotype: Genotype,
    kind: AblationKind,
    op: str | None = None,
    seed: int = 0,
) -> Genotype:
    """Apply one ablation and validate the result.

    Args:
        genotype: Baseline architecture (its shape is reused by the random ablation)
        kind: Which rewrite to apply
        op: Replacement op name for the replace ablations
        seed: Sampling seed for the random ablation

    Raises:
        GenotypeError: If a replacement op is missing or invalid
    """
    if kind in (AblationKind.REPLACE_ENTITY, AblationKind.REPLACE_EDGE) and op is None:
        raise GenotypeError(f"Ablation '{kind.value}' needs a replacement op")

    if kind == AblationKind.REPLACE_ENTITY:
        result = replace_ops(genotype, "entity", op)
    elif kind == AblationKind.REPLACE_EDGE:
        result = replace_ops(genotype, "edge", op)
    elif kind == AblationKind.SEQUENTIAL:
        result = sequentialize(genotype)
    else:
        rng = np.random.default_rng(seed)
        result = random_genotype(
            genotype.num_cells, genotype.num_nodes, genotype.d_v, genotype.d_e, rng
        )
    result.validate()
    logger.info(f"Applied ablation '{kind.value}' to a {genotype.num_cells}-cell genotype")
    return result
