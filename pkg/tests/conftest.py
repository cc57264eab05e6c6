"""Shared fixtures for the egnas test suite."""

import os

import numpy as np
import pytest

from tests.helpers import baseline_genotype, make_graph


def pytest_collection_modifyitems(config, items):
    if os.environ.get("EGNAS_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set EGNAS_RUN_SLOW=1 to run end-to-end experiments")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def small_graph(rng):
    """Five nodes, six undirected edges, random features."""
    return make_graph(rng)


@pytest.fixture
def genotype():
    return baseline_genotype()
