"""Operation sets, cell topology and the discrete genotype."""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from ..exceptions import GenotypeError

logger = logging.getLogger(__name__)

DEFAULT_NUM_NODES = 4
MAX_INCOMING = 2


class EntityOpKind(Enum):
    """Entity-updating operations, in alpha index order."""

    SUM = "Sum"
    MEAN = "Mean"
    MAX = "Max"
    ENTITY_SKIP = "EntitySkip"
    ZERO = "Zero"


class EdgeOpKind(Enum):
    """Edge-updating operations, in alpha index order."""

    CONCAT = "Concat"
    GRU = "GRU"
    FILM = "FiLM"
    EDGE_SKIP = "EdgeSkip"
    ZERO = "Zero"


ENTITY_OPS: tuple[EntityOpKind, ...] = tuple(EntityOpKind)
EDGE_OPS: tuple[EdgeOpKind, ...] = tuple(EdgeOpKind)
SKIP_OPS = (EntityOpKind.ENTITY_SKIP, EdgeOpKind.EDGE_SKIP)


def parse_op(dag: str, name: str) -> EntityOpKind | EdgeOpKind:
    """Look up an op by its JSON name in the ``entity`` or ``edge`` set."""
    kinds = EntityOpKind if dag == "entity" else EdgeOpKind
    try:
        return kinds(name)
    except ValueError as e:
        valid = [k.value for k in kinds]
        raise GenotypeError(f"Unknown {dag} op '{name}', expected one of {valid}") from e


@dataclass(frozen=True)
class CellTopology:
    """Candidate edge structure shared by the entity and edge DAGs.

    Node 0 is the cell input; nodes 1..num_nodes are intermediate. Candidate
    edges only go from lower to higher index, so both DAGs are acyclic.
    """

    num_nodes: int = DEFAULT_NUM_NODES

    @property
    def candidate_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for j in range(1, self.num_nodes + 1) for i in range(j)]

    def incoming(self, j: int) -> list[int]:
        return list(range(j))


Choice = tuple[int, int, Any]


@dataclass
class CellGenotype:
    """Chosen (src, dst, op) edges of one cell's entity and edge DAGs."""

    entity: list[tuple[int, int, EntityOpKind]] = field(default_factory=list)
    edge: list[tuple[int, int, EdgeOpKind]] = field(default_factory=list)

    @property
    def num_nodes(self) -> int:
        return max((dst for _, dst, _ in self.entity + self.edge), default=0)

    def dag(self, name: str) -> list[Choice]:
        return self.entity if name == "entity" else self.edge


@dataclass
class Genotype:
    """Discrete architecture: per-cell chosen edges and the hidden widths."""

    cells: list[CellGenotype]
    d_v: int
    d_e: int

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    @property
    def num_nodes(self) -> int:
        return max((cell.num_nodes for cell in self.cells), default=0)

    @property
    def topology(self) -> CellTopology:
        return CellTopology(self.num_nodes)

    def validate(self) -> None:
        """Check every invariant of a derived architecture.

        Raises:
            GenotypeError: If there are no cells, an edge is not forward, a
                chosen op is Zero, or a node lacks 1-2 incoming edges
        """
        if not self.cells:
            raise GenotypeError("Genotype has no cells")
        if self.d_v <= 0 or self.d_e <= 0:
            raise GenotypeError(f"Hidden widths must be positive, got d_v={self.d_v}, d_e={self.d_e}")
        n = self.num_nodes
        for c, cell in enumerate(self.cells):
            for name, zero in (("entity", EntityOpKind.ZERO), ("edge", EdgeOpKind.ZERO)):
                incoming: dict[int, list[int]] = {j: [] for j in range(1, n + 1)}
                for src, dst, op in cell.dag(name):
                    if not 0 <= src < dst <= n:
                        raise GenotypeError(f"Cell {c} {name} edge ({src}, {dst}) is not forward")
                    if op == zero:
                        raise GenotypeError(f"Cell {c} {name} edge ({src}, {dst}) carries Zero")
                    if src in incoming[dst]:
                        raise GenotypeError(f"Cell {c} {name} edge ({src}, {dst}) is duplicated")
                    incoming[dst].append(src)
                for dst, sources in incoming.items():
                    if not 1 <= len(sources) <= MAX_INCOMING:
                        raise GenotypeError(
                            f"Cell {c} {name} node {dst} has {len(sources)} incoming edges, "
                            f"expected 1-{MAX_INCOMING}"
                        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "cells": [
                {
                    "entity": [[s, d, op.value] for s, d, op in cell.entity],
                    "edge": [[s, d, op.value] for s, d, op in cell.edge],
                }
                for cell in self.cells
            ],
            "d_v": self.d_v,
            "d_e": self.d_e,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Genotype":
        """Parse and validate a genotype.

        Raises:
            GenotypeError: If the structure is malformed or invalid
        """
        try:
            cells = [
                CellGenotype(
                    entity=[(int(s), int(d), parse_op("entity", op)) for s, d, op in cell["entity"]],
                    edge=[(int(s), int(d), parse_op("edge", op)) for s, d, op in cell["edge"]],
                )
                for cell in data["cells"]
            ]
            genotype = cls(cells=cells, d_v=int(data["d_v"]), d_e=int(data["d_e"]))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, GenotypeError):
                raise
            raise GenotypeError(f"Malformed genotype: {e}") from e
        genotype.validate()
        return genotype

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")
        logger.info(f"Saved genotype to {path}")

    @classmethod
    def load(cls, path: str | Path) -> "Genotype":
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise GenotypeError(f"{path}: malformed JSON ({e.msg})") from e
        return cls.from_dict(data)
