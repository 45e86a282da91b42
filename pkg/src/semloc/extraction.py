"""Node extraction: labeled 3D points -> object centroid nodes.

Points are clustered into connected components where two points connect
iff they share a label and lie strictly closer than cluster_distance.
"""

from __future__ import annotations

from collections import deque

import numpy as np
from scipy.spatial import cKDTree

from .graph import SemanticNode

DEFAULT_CLUSTER_DISTANCE = 1.0
DEFAULT_MIN_CLUSTER_SIZE = 5


class PointFormatError(ValueError):
    """Raised for malformed point files; message carries the line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def load_points(path):
    """Read a whitespace-separated `x y z label_id` file. `#` starts a comment.

    Returns (positions (n,3) float array, labels (n,) int array).
    """
    positions, labels = [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise PointFormatError(f"expected 4 fields, got {len(parts)}", lineno)
            try:
                xyz = [float(v) for v in parts[:3]]
                label = int(parts[3])
            except ValueError as exc:
                raise PointFormatError(str(exc), lineno) from exc
            if not all(np.isfinite(xyz)):
                raise PointFormatError("non-finite coordinate", lineno)
            if label < 0:
                raise PointFormatError("negative label id", lineno)
            positions.append(xyz)
            labels.append(label)
    return (np.array(positions, dtype=float).reshape(-1, 3),
            np.array(labels, dtype=int))


def _components(positions, cluster_distance):
    """Connected components under strict distance < cluster_distance (BFS)."""
    n = len(positions)
    if n == 0:
        return []
    tree = cKDTree(positions)
    seen = np.zeros(n, dtype=bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            j = queue.popleft()
            for k in tree.query_ball_point(positions[j], cluster_distance):
                # kd-tree ball query is inclusive; the predicate is strict
                if not seen[k] and np.linalg.norm(positions[k] - positions[j]) < cluster_distance:
                    seen[k] = True
                    comp.append(k)
                    queue.append(k)
        comps.append(comp)
    return comps


def extract_nodes(positions, labels, cluster_distance=DEFAULT_CLUSTER_DISTANCE,
                  min_cluster_size=DEFAULT_MIN_CLUSTER_SIZE):
    """Cluster labeled points into SemanticNodes.

    Each connected component of at least min_cluster_size points becomes one
    node at the unweighted centroid with size = component point count.
    """
    if cluster_distance <= 0:
        raise ValueError("cluster_distance must be > 0")
    if min_cluster_size < 1:
        raise ValueError("min_cluster_size must be >= 1")
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    labels = np.asarray(labels, dtype=int)

    nodes = []
    for label in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == label)
        for comp in _components(positions[idx], cluster_distance):
            if len(comp) < min_cluster_size:
                continue
            pts = positions[idx[comp]]
            nodes.append((label, pts.mean(axis=0), len(comp)))

    # deterministic id order regardless of input permutation
    nodes.sort(key=lambda rec: (rec[0], tuple(rec[1])))
    return [SemanticNode(id=i, label=label, position=pos, size=size)
            for i, (label, pos, size) in enumerate(nodes)]
