"""Per-node graph descriptors.

Three kinds: the label-triple path histogram (the fast descriptor this
package is built around), the 1-hop Neighbor Vector baseline, and the
random-walk label-sequence baseline.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass

import numpy as np

PATH_LENGTH = 3  # labels per counted path: start + two hops

DEFAULT_WALK_COUNT = 200
DEFAULT_WALK_DEPTH = 4

HISTOGRAM = "histogram"
NEIGHBOR = "neighbor"
WALK = "walk"
DESCRIPTOR_KINDS = (HISTOGRAM, NEIGHBOR, WALK)


@dataclass
class HistogramDescriptor:
    """Counts of ordered label triples over 2-hop paths from the owner node.

    Cell index for labels (a, b, c) is a*n_l^2 + b*n_l + c; length n_l^3.
    """

    node_id: int
    counts: np.ndarray


@dataclass
class NeighborVectorDescriptor:
    """Per-label neighbor counts; length n_l, sums to the owner's degree."""

    node_id: int
    counts: np.ndarray


@dataclass
class WalkDescriptor:
    """Multiset of label sequences from seeded uniform random walks."""

    node_id: int
    walks: tuple  # sorted tuple of label tuples; empty for isolated nodes


def _neighbor_label_counts(graph):
    """(n, n_l) matrix: row m counts the labels among m's neighbors."""
    n_l = graph.label_set.n_l
    counts = np.zeros((len(graph), n_l), dtype=np.int64)
    for m, nbrs in enumerate(graph.neighbors):
        if nbrs:
            np.add.at(counts[m], graph.labels[nbrs], 1)
    return counts


def extract_histograms(graph, path_length=PATH_LENGTH):
    """Path-histogram descriptor for every node.

    For path_length 3 this counts, for each neighbor m of i and each neighbor
    n of m (backtracking to i included), the label triple (l_i, l_m, l_n).
    Cost per node is O(M N) for M first-hop and N second-hop neighbors.
    path_length 2 degrades to label pairs (for the sensitivity study).
    """
    if path_length not in (2, 3, 4):
        raise ValueError("path_length must be 2, 3, or 4")
    n_l = graph.label_set.n_l
    labels = graph.labels
    out = []

    if path_length == 2:
        nbr_counts = _neighbor_label_counts(graph)
        for i in range(len(graph)):
            v = np.zeros(n_l * n_l, dtype=np.int64)
            v[labels[i] * n_l: (labels[i] + 1) * n_l] = nbr_counts[i]
            out.append(HistogramDescriptor(i, v))
        return out

    if path_length == 4:
        for i in range(len(graph)):
            v = np.zeros(n_l ** 4, dtype=np.int64)
            for m in graph.neighbors[i]:
                for n in graph.neighbors[m]:
                    base = ((labels[i] * n_l + labels[m]) * n_l + labels[n]) * n_l
                    for o in graph.neighbors[n]:
                        v[base + labels[o]] += 1
            out.append(HistogramDescriptor(i, v))
        return out

    nbr_counts = _neighbor_label_counts(graph)
    for i in range(len(graph)):
        v = np.zeros((n_l, n_l, n_l), dtype=np.int64)
        for m in graph.neighbors[i]:
            v[labels[i], labels[m]] += nbr_counts[m]
        out.append(HistogramDescriptor(i, v.reshape(-1)))
    return out


def extract_neighbor_vectors(graph):
    """Neighbor Vector baseline: counts[l] = neighbors of the node with label l."""
    nbr_counts = _neighbor_label_counts(graph)
    return [NeighborVectorDescriptor(i, nbr_counts[i]) for i in range(len(graph))]


def extract_random_walks(graph, walk_count=DEFAULT_WALK_COUNT,
                         walk_depth=DEFAULT_WALK_DEPTH, seed=0):
    """Random-walk baseline: walk_count uniform walks of walk_depth labels per node.

    Each node draws from its own RNG stream keyed by (seed, node id), so the
    result is independent of any parallel scheduling. Isolated nodes get an
    empty descriptor.
    """
    if walk_count < 1:
        raise ValueError("walk_count must be >= 1")
    if walk_depth < 2:
        raise ValueError("walk_depth must be >= 2")
    labels = graph.labels
    out = []
    for i in range(len(graph)):
        if not graph.neighbors[i]:
            out.append(WalkDescriptor(i, ()))
            continue
        rng = np.random.default_rng((seed, i))
        walks = []
        for _ in range(walk_count):
            cur = i
            seq = [int(labels[cur])]
            for _ in range(walk_depth - 1):
                nbrs = graph.neighbors[cur]
                cur = nbrs[rng.integers(len(nbrs))]
                seq.append(int(labels[cur]))
            walks.append(tuple(seq))
        out.append(WalkDescriptor(i, tuple(sorted(walks))))
    return out


def extract_descriptors(graph, kind=HISTOGRAM, walk_count=DEFAULT_WALK_COUNT,
                        walk_depth=DEFAULT_WALK_DEPTH, seed=0, path_length=PATH_LENGTH):
    """Dispatch on descriptor kind."""
    if kind == HISTOGRAM:
        return extract_histograms(graph, path_length=path_length)
    if kind == NEIGHBOR:
        return extract_neighbor_vectors(graph)
    if kind == WALK:
        return extract_random_walks(graph, walk_count=walk_count,
                                    walk_depth=walk_depth, seed=seed)
    raise ValueError(f"unknown descriptor kind {kind!r}")


def walk_similarity(a, b, walk_count):
    """Fraction of exactly-matching walk sequences (multiset intersection)."""
    if not a.walks or not b.walks:
        return 0.0
    inter = Counter(a.walks) & Counter(b.walks)
    return sum(inter.values()) / walk_count


def dump_descriptors_csv(descriptors, path):
    """Debug dump: node_id, cell_index, count; zero cells omitted."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "cell_index", "count"])
        for desc in descriptors:
            for cell in np.flatnonzero(desc.counts):
                writer.writerow([desc.node_id, int(cell), int(desc.counts[cell])])
