"""Model checkpoints: JSON metadata plus a flat float64 parameter blob."""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from ..autodiff.module import find_module
from ..exceptions import DataError
from ..searchspace.genotype import Genotype
from .model import Network
from .task import NetworkConfig, TaskSpec

logger = logging.getLogger(__name__)

METADATA_FILE = "checkpoint.json"
BLOB_FILE = "params.bin"


def config_to_dict(config: NetworkConfig) -> dict[str, Any]:
    return asdict(config)


def config_from_dict(data: dict[str, Any]) -> NetworkConfig:
    values = dict(data)
    values["task"] = TaskSpec(**values["task"])
    return NetworkConfig(**values)


def _state(model: Network) -> list[tuple[str, str, np.ndarray]]:
    entries = [(name, "param", p.data) for name, p in model.named_parameters()]
    entries += [(name, "buffer", arr) for name, arr in model.named_buffers()]
    return entries


def save_checkpoint(model: Network, directory: str | Path, extra: dict[str, Any] | None = None):
    """Write ``checkpoint.json`` and ``params.bin`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = _state(model)
    metadata = {
        "config": config_to_dict(model.config),
        "node_in_dim": model.node_init.embed.in_dim,
        "edge_in_dim": model.edge_init.embed.in_dim,
        "genotype": None if model.genotype is None else model.genotype.to_dict(),
        "manifest": [
            {"name": name, "kind": kind, "shape": list(arr.shape)} for name, kind, arr in entries
        ],
        **(extra or {}),
    }
    blob = b"".join(np.ascontiguousarray(arr, dtype="<f8").tobytes() for _, _, arr in entries)
    with open(directory / BLOB_FILE, "wb") as f:
        f.write(blob)
    with open(directory / METADATA_FILE, "w") as f:
        json.dump(metadata, f, indent=2)
        f.write("\n")
    logger.info(f"Saved checkpoint ({len(entries)} tensors) to {directory}")


def load_checkpoint(directory: str | Path) -> tuple[Network, dict[str, Any]]:
    """Rebuild a network from a checkpoint directory.

    Returns:
        (network in eval mode, metadata dictionary)

    Raises:
        DataError: If the manifest does not match the rebuilt network or the blob size
    """
    directory = Path(directory)
    with open(directory / METADATA_FILE) as f:
        metadata = json.load(f)
    genotype = metadata["genotype"]
    model = Network(
        config_from_dict(metadata["config"]),
        metadata["node_in_dim"],
        metadata["edge_in_dim"],
        genotype=None if genotype is None else Genotype.from_dict(genotype),
    )
    blob = np.fromfile(directory / BLOB_FILE, dtype="<f8")

    params = dict(model.named_parameters())
    offset = 0
    for entry in metadata["manifest"]:
        name, shape = entry["name"], tuple(entry["shape"])
        size = int(np.prod(shape))
        if offset + size > blob.size:
            raise DataError(f"Parameter blob too short for '{name}'")
        values = blob[offset : offset + size].reshape(shape)
        offset += size
        if entry["kind"] == "param":
            if name not in params or params[name].shape != shape:
                raise DataError(f"Checkpoint parameter '{name}' {shape} does not fit the network")
            params[name].data[...] = values
        else:
            owner, _, buffer = name.rpartition(".")
            find_module(model, owner).set_buffer(buffer, values)
    if offset != blob.size:
        raise DataError(f"Parameter blob has {blob.size - offset} unread values")
    model.eval()
    logger.info(f"Loaded checkpoint from {directory}")
    return model, metadata
