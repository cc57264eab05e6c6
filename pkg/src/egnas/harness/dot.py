"""Graphviz DOT rendering of a genotype."""

import logging
from pathlib import Path

from ..exceptions import GenotypeError
from ..searchspace.genotype import SKIP_OPS, Genotype

logger = logging.getLogger(__name__)

# dag -> (node prefix, cross-reference prefix, cluster title)
DAG_STYLE = {
    "edge": ("E", "V", "edge-updating"),
    "entity": ("V", "E", "entity-updating"),
}


def _node(cell: int, prefix: str, j: int) -> str:
    return f"c{cell}_{prefix}{j}"


def to_dot(genotype: Genotype) -> str:
    """Render each cell as two clusters: the edge DAG above the entity DAG.

    Non-skip edges are labeled ``op (+X_i)`` where X_i is the other DAG's
    node the op also reads. Skip edges are dashed.

    Raises:
        GenotypeError: If the genotype has no cells
    """
    if not genotype.cells:
        raise GenotypeError("Cannot render an empty genotype")
    n = genotype.num_nodes
    lines = ["digraph genotype {", "  rankdir=LR;", "  node [shape=box];"]
    for c, cell in enumerate(genotype.cells):
        for dag in ("edge", "entity"):
            prefix, other, title = DAG_STYLE[dag]
            lines.append(f"  subgraph cluster_{c}_{dag} {{")
            lines.append(f'    label="cell {c} {title}";')
            for j in range(n + 1):
                lines.append(f'    {_node(c, prefix, j)} [label="{prefix}{j}"];')
            for src, dst, op in cell.dag(dag):
                if op in SKIP_OPS:
                    attrs = f'label="{op.value}", style=dashed'
                else:
                    attrs = f'label="{op.value} (+{other}{src})"'
                lines.append(f"    {_node(c, prefix, src)} -> {_node(c, prefix, dst)} [{attrs}];")
            lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(genotype: Genotype, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_dot(genotype))
    logger.info(f"Wrote DOT rendering to {path}")
    return path
