"""Euclidean TSP graphs labeled by their exact optimal tour."""

import logging
from typing import Any

import numpy as np

from ...exceptions import DataError
from ..graph import Graph
from .base import BaseGenerator

logger = logging.getLogger(__name__)

MIN_CITIES = 3
MAX_CITIES = 12


def held_karp(dist: np.ndarray) -> tuple[float, list[int]]:
    """Exact shortest Hamiltonian cycle by dynamic programming over subsets.

    Args:
        dist: Symmetric (n, n) distance matrix

    Returns:
        (tour length, tour) where the tour starts at city 0 and returns to it
        implicitly
    """
    n = len(dist)
    if n == 1:
        return 0.0, [0]
    if n == 2:
        return float(2 * dist[0, 1]), [0, 1]

    # cost[(mask, last)]: shortest path from 0 through the cities in mask ending at last
    cost: dict[tuple[int, int], float] = {}
    parent: dict[tuple[int, int], int] = {}
    for k in range(1, n):
        cost[(1 << k, k)] = float(dist[0, k])
        parent[(1 << k, k)] = 0

    for size in range(2, n):
        for mask in range(1 << n):
            if mask & 1 or bin(mask).count("1") != size:
                continue
            for last in range(1, n):
                if not mask & (1 << last):
                    continue
                prev_mask = mask ^ (1 << last)
                best, best_prev = np.inf, -1
                for prev in range(1, n):
                    if not prev_mask & (1 << prev):
                        continue
                    candidate = cost[(prev_mask, prev)] + dist[prev, last]
                    if candidate < best:
                        best, best_prev = candidate, prev
                cost[(mask, last)] = float(best)
                parent[(mask, last)] = best_prev

    full = (1 << n) - 2
    length, last = np.inf, -1
    for k in range(1, n):
        candidate = cost[(full, k)] + dist[k, 0]
        if candidate < length:
            length, last = candidate, k

    tour = []
    mask = full
    while last != 0:
        tour.append(last)
        mask, last = mask ^ (1 << last), parent[(mask, last)]
    tour.append(0)
    tour.reverse()
    return float(length), tour


def tour_length(dist: np.ndarray, tour: list[int]) -> float:
    return float(sum(dist[tour[i], tour[(i + 1) % len(tour)]] for i in range(len(tour))))


def _city_range(num_cities: int | tuple[int, int] | list[int]) -> tuple[int, int]:
    if isinstance(num_cities, int):
        lo = hi = num_cities
    else:
        lo, hi = (int(v) for v in num_cities)
    if not MIN_CITIES <= lo <= hi <= MAX_CITIES:
        raise DataError(
            f"num_cities must lie in [{MIN_CITIES}, {MAX_CITIES}] for the exact solver, "
            f"got {num_cities}"
        )
    return lo, hi


class TSPGenerator(BaseGenerator):
    """Cities in the unit square; edges are k-NN links plus the optimal tour.

    Node features are coordinates, the single edge feature is the Euclidean
    distance, and edge labels mark (both directions of) optimal tour edges.
    """

    kind = "tsp"

    def __init__(self, num_cities: int | tuple[int, int] = (5, 9), knn_k: int = 3):
        self.city_range = _city_range(num_cities)
        if knn_k < 1:
            raise DataError(f"knn_k must be positive, got {knn_k}")
        self.knn_k = knn_k

    def params(self) -> dict[str, Any]:
        return {"num_cities": list(self.city_range), "knn_k": self.knn_k}

    def build(self, coords: np.ndarray) -> Graph:
        """Graph and labels for a fixed set of city coordinates."""
        n = len(coords)
        dist = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=-1)
        _, tour = held_karp(dist)

        on_tour = np.zeros((n, n), dtype=bool)
        for i in range(n):
            a, b = tour[i], tour[(i + 1) % n]
            if a != b:
                on_tour[a, b] = on_tour[b, a] = True

        adj = on_tour.copy()
        k = min(self.knn_k, n - 1)
        for i in range(n):
            order = [j for j in np.argsort(dist[i], kind="stable") if j != i]
            for j in order[:k]:
                adj[i, j] = adj[j, i] = True

        edges = np.argwhere(adj)
        return Graph(
            num_nodes=n,
            edges=edges,
            node_features=coords,
            edge_features=dist[edges[:, 0], edges[:, 1]].reshape(-1, 1),
            edge_labels=on_tour[edges[:, 0], edges[:, 1]].astype(np.int64),
        )

    def generate_one(self, rng: np.random.Generator) -> Graph:
        lo, hi = self.city_range
        n = int(rng.integers(lo, hi + 1))
        return self.build(rng.random((n, 2)))


def gen_tsp(
    num_graphs: int,
    num_cities: int | tuple[int, int],
    knn_k: int,
    seed: int,
) -> list[Graph]:
    """TSP edge-classification dataset."""
    return TSPGenerator(num_cities, knn_k).generate(num_graphs, seed)
