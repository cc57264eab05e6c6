"""Tests for retraining derived architectures."""

import csv

import numpy as np
import pytest

from egnas.exceptions import NumericError
from egnas.graphdata.generators import gen_sbm
from egnas.network.checkpoint import load_checkpoint
from egnas.network.model import Network
from egnas.network.task import NetworkConfig, TaskSpec
from egnas.network.trainer import METRICS_HEADER, TrainConfig, Trainer, check_finite, evaluate
from tests.helpers import baseline_genotype, skip_genotype


def sbm_network(genotype) -> Network:
    config = NetworkConfig(
        task=TaskSpec.for_dataset("sbm"),
        num_cells=genotype.num_cells,
        num_nodes=genotype.num_nodes,
        d_v=genotype.d_v,
    )
    return Network(config, 3, 0, seed=1, genotype=genotype)


@pytest.fixture
def splits():
    graphs = gen_sbm(12, 3, 2, 0.7, 0.1, 0.3, seed=4)
    return graphs[:6], graphs[6:9], graphs[9:]


def test_fit_writes_metrics_and_best_checkpoint(splits, tmp_path):
    model = sbm_network(baseline_genotype(num_cells=1, d=4))
    result = Trainer(model, TrainConfig(epochs=3, batch_size=4, lr=1e-2), tmp_path).fit(*splits)

    with open(tmp_path / "metrics.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == METRICS_HEADER
    assert [row[0] for row in rows[1:]] == ["1", "2", "3"]

    val_losses = [row["val_loss"] for row in result.history]
    assert result.best_epoch == int(np.argmin(val_losses)) + 1
    assert result.best_val_loss == min(val_losses)
    assert result.test_metric == result.history[result.best_epoch - 1]["test_metric"]

    _, metadata = load_checkpoint(tmp_path / "checkpoint")
    assert metadata["epoch"] == result.best_epoch


def test_stops_when_halvings_bring_no_improvement(splits):
    model = sbm_network(skip_genotype(num_cells=1, num_nodes=2, d=4))
    config = TrainConfig(epochs=50, batch_size=4, lr=0.0, patience=1, max_stale_halvings=1)
    result = Trainer(model, config).fit(*splits)
    assert result.best_epoch == 1
    assert len(result.history) == 2


def test_evaluate_restores_mode(splits):
    model = sbm_network(baseline_genotype(num_cells=1, d=4))
    model.train()
    loss, accuracy = evaluate(model, splits[1], batch_size=2)
    assert model.training
    assert loss > 0.0
    assert 0.0 <= accuracy <= 1.0
    model.eval()
    evaluate(model, splits[1])
    assert not model.training


def test_batch_size_does_not_change_evaluation(splits):
    model = sbm_network(baseline_genotype(num_cells=1, d=4))
    whole = evaluate(model, splits[0], batch_size=64)
    pieces = evaluate(model, splits[0], batch_size=1)
    assert pieces == pytest.approx(whole, abs=1e-12)


def test_non_finite_values_raise():
    check_finite(1.0, "loss")
    with pytest.raises(NumericError):
        check_finite(float("nan"), "loss")
