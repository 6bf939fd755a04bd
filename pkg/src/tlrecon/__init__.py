"""Reconstruct bounded-degree, bounded-treelength graphs from distance queries."""

from .graph import Graph, edge_set
from .oracle import BudgetExhausted, CountingOracle
from .reconstructor import ReconstructionConfig, ReconstructionReport, reconstruct
from .witness import GeneratedInstance, TreeDecomposition, generate

__all__ = [
    "Graph",
    "edge_set",
    "CountingOracle",
    "BudgetExhausted",
    "ReconstructionConfig",
    "ReconstructionReport",
    "reconstruct",
    "GeneratedInstance",
    "TreeDecomposition",
    "generate",
]
