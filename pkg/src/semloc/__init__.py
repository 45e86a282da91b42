"""semloc: semantic-graph global localization between map coordinate frames."""

from .graph import (LabelSet, SemanticGraph, SemanticNode, build_graph,
                    load_graph, merge_nodes, save_graph)
from .extraction import extract_nodes, load_points
from .descriptors import (extract_histograms, extract_neighbor_vectors,
                          extract_random_walks)
from .matching import candidate_matches, ransac_filter, score
from .pose import RigidTransform, residual, solve_rigid
from .pipeline import build_semantic_graph, localize
from .config import RunConfig

__version__ = "0.1.0"

__all__ = [
    "LabelSet", "SemanticGraph", "SemanticNode", "build_graph", "load_graph",
    "merge_nodes", "save_graph", "extract_nodes", "load_points",
    "extract_histograms", "extract_neighbor_vectors", "extract_random_walks",
    "candidate_matches", "ransac_filter", "score", "RigidTransform",
    "residual", "solve_rigid", "build_semantic_graph", "localize", "RunConfig",
]
