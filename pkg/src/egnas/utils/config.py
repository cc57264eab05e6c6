"""Configuration management utilities."""

import copy
import logging
import os
from pathlib import Path
from typing import Any

import yaml

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "output_dir": "runs/default",
    "dataset": {
        "kind": "sbm",
        "name": "sbm",
        "dir": "data/sbm",
        "params": {},
        "sizes": {"train": 200, "val": 100, "test": 100},
    },
    "network": {
        "num_cells": 4,
        "num_nodes": 4,
        "d_v": 16,
        "d_e": None,
        "dropout": 0.0,
    },
    "search": {
        "epochs": 40,
        "batch_size": 64,
        "w_lr": 0.025,
        "w_momentum": 0.9,
        "w_weight_decay": 3e-4,
        "alpha_lr": 3e-4,
        "alpha_betas": [0.5, 0.999],
        "alpha_weight_decay": 1e-3,
    },
    "train": {
        "epochs": 100,
        "batch_size": 64,
        "lr": 1e-3,
        "patience": 10,
        "lr_factor": 0.5,
        "lr_floor": 1e-5,
        "max_stale_halvings": 2,
    },
    "logging": {
        "level": "INFO",
        "file": "logs/egnas.log",
        "console": True,
    },
}

# Sections whose contents are free-form (generator keyword arguments).
FREE_FORM = {"dataset.params"}

LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


def load_config(config_path: str | Path = "config.yaml") -> dict[str, Any]:
    """Load configuration from a YAML (or JSON) file.

    Args:
        config_path: Path to config file

    Returns:
        Configuration dictionary as written in the file

    Raises:
        ConfigError: If the file is missing, unparsable or not a mapping
    """
    config_file = Path(config_path)

    if not config_file.exists():
        raise ConfigError(
            f"Config file not found: {config_path}\n"
            f"Please copy config.yaml.example to config.yaml and adjust it."
        )

    logger.info(f"Loading configuration from {config_path}")

    try:
        with open(config_file) as f:
            config = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {config_path}: {e}") from e

    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise ConfigError(f"Config file {config_path} must contain a mapping")

    logger.info("Configuration loaded successfully")
    return config


def _merge(defaults: dict[str, Any], given: dict[str, Any], path: str) -> dict[str, Any]:
    merged = copy.deepcopy(defaults)
    for key, value in given.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"Unknown config key: {where}")
        if isinstance(defaults[key], dict) and where not in FREE_FORM:
            if not isinstance(value, dict):
                raise ConfigError(f"Config section {where} must be a mapping")
            merged[key] = _merge(defaults[key], value, where)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def _positive_int(section: dict[str, Any], key: str, where: str, minimum: int = 1) -> None:
    value = section[key]
    _require(_is_int(value) and value >= minimum, f"{where}.{key} must be an integer >= {minimum}")


def _positive(section: dict[str, Any], key: str, where: str, allow_zero: bool = False) -> None:
    value = section[key]
    ok = _is_number(value) and (value >= 0 if allow_zero else value > 0)
    bound = ">= 0" if allow_zero else "> 0"
    _require(ok, f"{where}.{key} must be a number {bound}")


def validate_config(config: dict[str, Any]) -> dict[str, Any]:
    """Fill in defaults and validate every field.

    Args:
        config: Configuration dictionary as loaded from file

    Returns:
        Complete configuration dictionary

    Raises:
        ConfigError: If a key is unknown or a value is out of range
    """
    cfg = _merge(DEFAULTS, config, "")

    _require(_is_int(cfg["seed"]) and cfg["seed"] >= 0, "seed must be a non-negative integer")
    _require(isinstance(cfg["output_dir"], str) and cfg["output_dir"], "output_dir must be a path")

    dataset = cfg["dataset"]
    for key in ("kind", "name", "dir"):
        _require(isinstance(dataset[key], str) and dataset[key], f"dataset.{key} must be a string")
    _require(isinstance(dataset["params"], dict), "dataset.params must be a mapping")
    for split, size in dataset["sizes"].items():
        _require(_is_int(size) and size >= 0, f"dataset.sizes.{split} must be an integer >= 0")

    network = cfg["network"]
    for key in ("num_cells", "num_nodes", "d_v"):
        _positive_int(network, key, "network")
    if network["d_e"] is not None:
        _positive_int(network, "d_e", "network")
    dropout = network["dropout"]
    _require(_is_number(dropout) and 0 <= dropout < 1, "network.dropout must be in [0, 1)")

    search = cfg["search"]
    _positive_int(search, "epochs", "search", minimum=0)
    _positive_int(search, "batch_size", "search")
    _positive(search, "w_lr", "search")
    _positive(search, "w_momentum", "search", allow_zero=True)
    _positive(search, "w_weight_decay", "search", allow_zero=True)
    # alpha_lr = 0 freezes the architecture weights.
    _positive(search, "alpha_lr", "search", allow_zero=True)
    _positive(search, "alpha_weight_decay", "search", allow_zero=True)
    betas = search["alpha_betas"]
    _require(
        isinstance(betas, list | tuple)
        and len(betas) == 2
        and all(_is_number(b) and 0 <= b < 1 for b in betas),
        "search.alpha_betas must be two numbers in [0, 1)",
    )

    train = cfg["train"]
    _positive_int(train, "epochs", "train", minimum=0)
    _positive_int(train, "batch_size", "train")
    _positive_int(train, "patience", "train")
    _positive_int(train, "max_stale_halvings", "train")
    _positive(train, "lr", "train")
    _positive(train, "lr_floor", "train", allow_zero=True)
    factor = train["lr_factor"]
    _require(_is_number(factor) and 0 < factor < 1, "train.lr_factor must be in (0, 1)")

    log_config = cfg["logging"]
    level = log_config["level"]
    _require(
        isinstance(level, str) and level.upper() in LOG_LEVELS,
        f"logging.level must be one of {sorted(LOG_LEVELS)}",
    )

    logger.info("Configuration validated successfully")
    return cfg


def dataset_paths(config: dict[str, Any]) -> dict[str, Path]:
    """JSONL path of each split plus the provenance file."""
    dataset = config["dataset"]
    root = Path(dataset["dir"])
    name = dataset["name"]
    paths = {split: root / f"{name}.{split}.jsonl" for split in ("train", "val", "test")}
    paths["provenance"] = root / f"{name}.provenance.json"
    return paths


def check_paths(config: dict[str, Any], needs_data: bool = True) -> None:
    """Validate referenced paths before any compute.

    Args:
        config: Validated configuration
        needs_data: Whether the dataset split files must already exist

    Raises:
        ConfigError: If a dataset file is missing or the output directory cannot be created
    """
    if needs_data:
        paths = dataset_paths(config)
        for split in ("train", "val", "test"):
            path = paths[split]
            if not path.is_file() or not os.access(path, os.R_OK):
                raise ConfigError(
                    f"Dataset file not readable: {path}\n"
                    f"Run 'egnas gen-data' with the same config first."
                )
    output_dir = Path(config["output_dir"])
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cannot create output directory {output_dir}: {e}") from e
    if not os.access(output_dir, os.W_OK):
        raise ConfigError(f"Output directory is not writable: {output_dir}")
