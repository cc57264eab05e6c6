"""Experiment runner tying configuration, data, search and retraining together."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from .exceptions import DataError
from .graphdata.generators import GENERATOR_VERSION, SPLITS, build_generator, generate_splits
from .graphdata.graph import Graph, batch
from .graphdata.io import load_jsonl, save_jsonl
from .harness.baselines import nearest_edge_f1
from .network.checkpoint import load_checkpoint
from .network.model import Network
from .network.task import NetworkConfig, TaskSpec
from .network.trainer import TrainConfig, Trainer, TrainResult, evaluate
from .search.searcher import SearchConfig, Searcher, SearchResult
from .searchspace.genotype import Genotype
from .utils import even_odd_split, thread_count
from .utils.config import dataset_paths

logger = logging.getLogger(__name__)


def input_dims(graphs: list[Graph]) -> tuple[int, int]:
    """Raw node and edge feature widths of a dataset."""
    merged = batch(graphs).graph
    return merged.node_dim, merged.edge_dim


class ExperimentRunner:
    """Runs the pipeline steps of one validated configuration."""

    def __init__(self, config: dict[str, Any]):
        """Initialize the runner.

        Args:
            config: Configuration dictionary returned by ``validate_config``
        """
        self.config = config
        self.seed = config["seed"]
        self.output_dir = Path(config["output_dir"])
        self.paths = dataset_paths(config)

    @property
    def task(self) -> TaskSpec:
        dataset = self.config["dataset"]
        return TaskSpec.for_dataset(dataset["kind"], dataset["params"])

    def network_config(self, genotype: Genotype | None = None) -> NetworkConfig:
        """Network shape from the config, or from ``genotype`` when one is given."""
        net = self.config["network"]
        if genotype is None:
            return NetworkConfig(
                task=self.task,
                num_cells=net["num_cells"],
                num_nodes=net["num_nodes"],
                d_v=net["d_v"],
                d_e=net["d_e"],
                dropout=net["dropout"],
            )
        return NetworkConfig(
            task=self.task,
            num_cells=genotype.num_cells,
            num_nodes=genotype.num_nodes,
            d_v=genotype.d_v,
            d_e=genotype.d_e,
            dropout=net["dropout"],
        )

    def gen_data(self) -> dict[str, Path]:
        """Generate the three splits and their provenance file.

        Returns:
            Dictionary of written paths by split, plus ``provenance``
        """
        dataset = self.config["dataset"]
        generator = build_generator(dataset["kind"], dataset["params"])
        sizes = {split: int(dataset["sizes"].get(split, 0)) for split in SPLITS}
        logger.info(f"Generating {dataset['kind']} dataset '{dataset['name']}' with sizes {sizes}")
        splits = generate_splits(generator, sizes, self.seed)

        workers = min(thread_count(), len(SPLITS))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(save_jsonl, splits[split], self.paths[split]) for split in SPLITS
            ]
            for future in futures:
                future.result()

        provenance = {
            "kind": generator.kind,
            "params": generator.params(),
            "sizes": sizes,
            "seed": self.seed,
            "generator_version": GENERATOR_VERSION,
        }
        with open(self.paths["provenance"], "w") as f:
            json.dump(provenance, f, indent=2)
            f.write("\n")
        logger.info(f"Wrote provenance to {self.paths['provenance']}")
        return {split: self.paths[split] for split in (*SPLITS, "provenance")}

    def load_splits(self) -> dict[str, list[Graph]]:
        splits = {split: load_jsonl(self.paths[split]) for split in SPLITS}
        if not splits["train"]:
            raise DataError(f"Training split {self.paths['train']} is empty")
        return splits

    def search(self) -> SearchResult:
        """Search on the training split, its odd half serving as the validation half."""
        splits = self.load_splits()
        search_train, search_val = even_odd_split(splits["train"])
        node_in, edge_in = input_dims(splits["train"])
        model = Network(self.network_config(), node_in, edge_in, seed=self.seed)
        search_config = SearchConfig(**self.config["search"], seed=self.seed)
        logger.info(
            f"Search halves: {len(search_train)} graphs for weights, "
            f"{len(search_val)} for architecture"
        )
        return Searcher(model, search_config, self.output_dir).search(search_train, search_val)

    def train(self, genotype: Genotype) -> TrainResult:
        """Retrain ``genotype`` from scratch on train, selecting on val, reporting test."""
        splits = self.load_splits()
        node_in, edge_in = input_dims(splits["train"])
        model = Network(
            self.network_config(genotype), node_in, edge_in, seed=self.seed, genotype=genotype
        )
        train_config = TrainConfig(**self.config["train"], seed=self.seed)
        trainer = Trainer(model, train_config, self.output_dir)
        return trainer.fit(splits["train"], splits["val"], splits["test"])

    def evaluate(self, checkpoint_dir: str | Path) -> dict[str, Any]:
        """Score a checkpoint on the test split and write ``eval.json``."""
        model, metadata = load_checkpoint(checkpoint_dir)
        test = load_jsonl(self.paths["test"])
        loss, metric = evaluate(model, test, self.config["train"]["batch_size"])
        task = model.config.task
        report: dict[str, Any] = {
            "checkpoint": str(checkpoint_dir),
            "split": "test",
            "num_graphs": len(test),
            "loss": loss,
            "metric_name": task.metric,
            "metric": metric,
        }
        if task.level == "edge" and self.config["dataset"]["kind"] == "tsp":
            k = int(self.config["dataset"]["params"].get("knn_k", 3))
            report["heuristic_metric"] = nearest_edge_f1(test, k)
        if "epoch" in metadata:
            report["epoch"] = metadata["epoch"]

        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / "eval.json"
        with open(path, "w") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
        logger.info(f"Wrote evaluation report to {path}")
        return report
