"""Edge-colored random graphs split into rainbow random k-out parts."""

from .decomposition import DecompositionResult, decompose, plan_ordering, verify_decomposition
from .graph import BipartiteGraph, ColoredGraph, Graph, Orientation, load_colored, load_graph, save_colored, save_graph
from .seeding import Seed

__all__ = [
    "BipartiteGraph",
    "ColoredGraph",
    "DecompositionResult",
    "Graph",
    "Orientation",
    "Seed",
    "decompose",
    "load_colored",
    "load_graph",
    "plan_ordering",
    "save_colored",
    "save_graph",
    "verify_decomposition",
]

__version__ = "0.1.0"
