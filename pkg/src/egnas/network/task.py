"""Task and network configuration."""

from dataclasses import dataclass, field
from typing import Any

from ..exceptions import ConfigError

LEVELS = ("node", "edge", "graph")
LOSSES = ("cross_entropy", "absolute_error")
METRICS = ("accuracy", "binary_f1", "mae")


@dataclass(frozen=True)
class TaskSpec:
    """What the network predicts and how it is scored.

    Attributes:
        level: node, edge or graph
        num_classes: Output width (1 for regression)
        loss: cross_entropy or absolute_error
        metric: accuracy, binary_f1 or mae
    """

    level: str
    num_classes: int
    loss: str
    metric: str

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ConfigError(f"Unknown task level '{self.level}'")
        if self.loss not in LOSSES:
            raise ConfigError(f"Unknown loss '{self.loss}'")
        if self.metric not in METRICS:
            raise ConfigError(f"Unknown metric '{self.metric}'")
        if self.num_classes < 1:
            raise ConfigError(f"num_classes must be positive, got {self.num_classes}")
        if self.loss == "absolute_error" and self.num_classes != 1:
            raise ConfigError("Regression tasks need num_classes = 1")
        if self.metric == "mae" and self.loss != "absolute_error":
            raise ConfigError("The mae metric is only defined for regression tasks")

    @property
    def is_regression(self) -> bool:
        return self.loss == "absolute_error"

    @property
    def higher_is_better(self) -> bool:
        return self.metric != "mae"

    @classmethod
    def for_dataset(cls, kind: str, params: dict[str, Any] | None = None) -> "TaskSpec":
        """Task implied by a synthetic dataset kind."""
        params = params or {}
        if kind == "sbm":
            return cls("node", int(params.get("num_communities", 2)), "cross_entropy", "accuracy")
        if kind == "tsp":
            return cls("edge", 2, "cross_entropy", "binary_f1")
        if kind == "graphreg":
            return cls("graph", 1, "absolute_error", "mae")
        if kind == "graphcls":
            return cls("graph", 2, "cross_entropy", "accuracy")
        raise ConfigError(f"No task defined for dataset kind '{kind}'")


@dataclass(frozen=True)
class NetworkConfig:
    """Stacked-cell network shape.

    Attributes:
        task: Output task
        num_cells: Number of stacked cells
        num_nodes: Intermediate nodes per DAG
        d_v: Hidden entity width
        d_e: Hidden edge width (defaults to d_v)
        dropout: Dropout rate after each cell's output projection
    """

    task: TaskSpec
    num_cells: int = 4
    num_nodes: int = 4
    d_v: int = 16
    d_e: int | None = field(default=None)
    dropout: float = 0.0

    def __post_init__(self):
        if self.d_e is None:
            object.__setattr__(self, "d_e", self.d_v)
        if min(self.num_cells, self.num_nodes, self.d_v, self.d_e) <= 0:
            raise ConfigError("num_cells, num_nodes, d_v and d_e must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
