"""Synthetic dataset generators and their registry."""

import logging
from typing import Any

import numpy as np

from ...exceptions import DataError
from ..graph import Graph
from .base import GENERATOR_VERSION, BaseGenerator
from .random_graphs import (
    GraphClassificationGenerator,
    GraphRegressionGenerator,
    gen_graphcls,
    gen_graphreg,
)
from .sbm import SBMGenerator, gen_sbm
from .tsp import TSPGenerator, gen_tsp, held_karp

logger = logging.getLogger(__name__)

GENERATORS: dict[str, type[BaseGenerator]] = {
    "sbm": SBMGenerator,
    "tsp": TSPGenerator,
    "graphreg": GraphRegressionGenerator,
    "graphcls": GraphClassificationGenerator,
}

SPLITS = ("train", "val", "test")


def build_generator(kind: str, params: dict[str, Any] | None = None) -> BaseGenerator:
    """Instantiate the generator registered under ``kind``.

    Raises:
        DataError: If the kind is unknown or the parameters are invalid
    """
    if kind not in GENERATORS:
        raise DataError(f"Unknown dataset kind '{kind}', expected one of {sorted(GENERATORS)}")
    try:
        return GENERATORS[kind](**(params or {}))
    except TypeError as e:
        raise DataError(f"Invalid parameters for '{kind}': {e}") from e


def generate_splits(
    generator: BaseGenerator, sizes: dict[str, int], seed: int
) -> dict[str, list[Graph]]:
    """Draw train/val/test splits from independent child seeds of ``seed``."""
    children = np.random.SeedSequence(seed).spawn(len(SPLITS))
    return {
        split: generator.generate(int(sizes.get(split, 0)), child)
        for split, child in zip(SPLITS, children, strict=True)
    }
