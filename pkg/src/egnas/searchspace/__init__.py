"""Edge-featured cell search space."""

from .cell import Cell
from .embedding import EdgeInit, NodeInit, e0_init
from .genotype import (
    EDGE_OPS,
    ENTITY_OPS,
    CellGenotype,
    CellTopology,
    EdgeOpKind,
    EntityOpKind,
    Genotype,
)
from .mixed import MixedOp
