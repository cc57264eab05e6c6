"""Base generator class for synthetic datasets."""

import logging
from typing import Any

import numpy as np

from ...exceptions import DataError
from ..graph import Graph

logger = logging.getLogger(__name__)

GENERATOR_VERSION = "2"


def nx_seed(rng: np.random.Generator) -> int:
    """Integer seed for networkx samplers, drawn from ``rng`` so one seed drives both."""
    return int(rng.integers(2**32))


class BaseGenerator:
    """Base class for synthetic dataset generators.

    Subclasses validate their parameters in ``__init__`` and implement
    ``generate_one``; ``generate`` is a pure function of the parameters and
    the seed.
    """

    kind = "base"

    def params(self) -> dict[str, Any]:
        """Parameters as written to the provenance file."""
        raise NotImplementedError("Subclasses must implement params method")

    def generate_one(self, rng: np.random.Generator) -> Graph:
        """Draw a single graph.

        Raises:
            NotImplementedError: Must be implemented by subclasses
        """
        raise NotImplementedError("Subclasses must implement generate_one method")

    def generate(self, num_graphs: int, seed: int | np.random.SeedSequence) -> list[Graph]:
        """Draw ``num_graphs`` graphs from a generator seeded with ``seed``."""
        if num_graphs < 0:
            raise DataError(f"num_graphs must be non-negative, got {num_graphs}")
        rng = np.random.default_rng(seed)
        logger.debug(f"Generating {num_graphs} {self.kind} graphs")
        return [self.generate_one(rng) for _ in range(num_graphs)]
