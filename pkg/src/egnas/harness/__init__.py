"""Ablations, reporting and reference baselines behind the command line."""

from .ablation import AblationKind, ablate, random_genotype, replace_ops, sequentialize
from .baselines import nearest_edge_f1
from .dot import export_dot, to_dot
from .stats import CellStats, cell_stats, stats_csv
