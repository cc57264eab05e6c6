"""Utility functions for egnas."""

import logging
import os
from collections.abc import Iterator, Sequence
from typing import TypeVar

import numpy as np
from dotenv import load_dotenv

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")

THREADS_ENV = "EGNAS_THREADS"


def iter_batches(
    items: Sequence[T], batch_size: int, rng: np.random.Generator | None = None
) -> Iterator[list[T]]:
    """Yield consecutive chunks of ``items``, shuffled first when ``rng`` is given.

    Args:
        items: Sequence to split
        batch_size: Maximum chunk length (the last chunk may be shorter)
        rng: Optional generator used for a permutation of the items

    Example:
        >>> list(iter_batches([1, 2, 3, 4, 5], 2))
        [[1, 2], [3, 4], [5]]
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {batch_size}")
    order = np.arange(len(items)) if rng is None else rng.permutation(len(items))
    for start in range(0, len(items), batch_size):
        yield [items[k] for k in order[start : start + batch_size]]


def even_odd_split(items: Sequence[T]) -> tuple[list[T], list[T]]:
    """Interleaved halves: even positions, odd positions.

    Example:
        >>> even_odd_split(["a", "b", "c", "d", "e"])
        (['a', 'c', 'e'], ['b', 'd'])
    """
    return list(items[0::2]), list(items[1::2])


def thread_count(default: int = 1) -> int:
    """Worker thread cap from ``EGNAS_THREADS`` (a local ``.env`` is loaded first).

    Raises:
        ConfigError: If the variable is set but not a positive integer
    """
    load_dotenv()
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got '{raw}'") from e
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be at least 1, got {value}")
    return value
