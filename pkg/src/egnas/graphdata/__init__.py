"""Graphs, batching, persistence and synthetic datasets."""

from .graph import Graph, GraphBatch, batch, unbatch
from .io import load_jsonl, save_jsonl
