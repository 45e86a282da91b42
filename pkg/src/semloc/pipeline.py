"""End-to-end localization: graph build -> descriptors -> matching -> pose."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import descriptors, graph, matching, pose

log = logging.getLogger(__name__)


@dataclass
class LocalizationResult:
    transform: pose.RigidTransform   # maps query coordinates into the reference frame
    candidates: list
    inliers: list
    inlier_count: int
    timings_ms: dict = field(default_factory=dict)


def build_semantic_graph(nodes, cfg, drop_labels=()):
    """Merge close same-label nodes and build proximity edges."""
    if drop_labels:
        drop = set(drop_labels)
        nodes = [nd for nd in nodes if nd.label not in drop]
    merged = graph.merge_nodes(nodes, cfg.merge_radius)
    return graph.build_graph(merged, cfg.connectivity_threshold)


def harmonize_label_sets(graph_a, graph_b):
    """Rebuild two graphs over a common label vocabulary if theirs differ.

    Graphs loaded from independent point files size their label set to the
    labels they saw; descriptors are only comparable over a shared n_l.
    """
    if graph_a.label_set.names == graph_b.label_set.names:
        return graph_a, graph_b
    n_l = max(graph_a.label_set.n_l, graph_b.label_set.n_l)
    label_set = graph.LabelSet.generic(n_l)
    return (graph.SemanticGraph(label_set, graph_a.nodes, graph_a.edges,
                                graph_a.connectivity_threshold),
            graph.SemanticGraph(label_set, graph_b.nodes, graph_b.edges,
                                graph_b.connectivity_threshold))


def node_weights(inliers, graph_a, graph_b):
    """Correspondence weights: min of the two node sizes, normalized to sum 1."""
    w = np.array([min(graph_a.sizes[c.id_a], graph_b.sizes[c.id_b])
                  for c in inliers], dtype=float)
    return w / w.sum()


def localize(query_graph, reference_graph, cfg):
    """Estimate the rigid transform mapping the query frame onto the reference.

    Runs descriptor extraction on both graphs, same-label candidate search,
    RANSAC outlier rejection, and a final size-weighted rigid solve over the
    inliers (seeded by the RANSAC model; correspondences are fixed, so the
    refinement is a single closed-form solve).
    """
    timings = {}

    start = time.perf_counter()
    descs_q = descriptors.extract_descriptors(
        query_graph, kind=cfg.descriptor, walk_count=cfg.walk_count,
        walk_depth=cfg.walk_depth, seed=cfg.seed, path_length=cfg.path_length)
    descs_r = descriptors.extract_descriptors(
        reference_graph, kind=cfg.descriptor, walk_count=cfg.walk_count,
        walk_depth=cfg.walk_depth, seed=cfg.seed + 1, path_length=cfg.path_length)
    timings["descriptor"] = (time.perf_counter() - start) * 1e3

    start = time.perf_counter()
    candidates = matching.candidate_matches(
        descs_q, descs_r, query_graph, reference_graph,
        score_threshold=cfg.score_threshold, same_label_only=cfg.same_label_only,
        walk_count=cfg.walk_count)
    result = matching.ransac_filter(
        candidates, query_graph.positions, reference_graph.positions,
        iterations=cfg.ransac_iterations, tolerance=cfg.ransac_tolerance,
        seed=cfg.seed)
    timings["matching"] = (time.perf_counter() - start) * 1e3

    start = time.perf_counter()
    P = query_graph.positions[[c.id_a for c in result.inliers]]
    Q = reference_graph.positions[[c.id_b for c in result.inliers]]
    transform = result.transform
    if len(result.inliers) >= 3:
        try:
            weights = node_weights(result.inliers, query_graph, reference_graph)
            transform = pose.solve_rigid(P, Q, weights)
        except pose.DegenerateGeometryError:
            log.warning("inlier set degenerate; keeping the RANSAC model")
    timings["pose"] = (time.perf_counter() - start) * 1e3

    log.info("localize: %d candidates, %d inliers", len(candidates), result.inlier_count)
    return LocalizationResult(transform=transform, candidates=candidates,
                              inliers=result.inliers,
                              inlier_count=result.inlier_count,
                              timings_ms=timings)
