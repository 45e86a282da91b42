"""Semantic graph data model: labeled centroid nodes plus proximity edges."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_CONNECTIVITY = 10.0
DEFAULT_MERGE_RADIUS = 3.0


class GraphFormatError(ValueError):
    """Raised when a graph file fails validation. Carries a field diagnostic."""

    def __init__(self, message, field_path=None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class LabelSet:
    """Semantic label vocabulary; label indices run 0..n_l-1."""

    names: tuple

    def __post_init__(self):
        if len(self.names) < 1:
            raise ValueError("label set must contain at least one label")
        if len(set(self.names)) != len(self.names):
            raise ValueError("label names must be unique")

    @property
    def n_l(self):
        return len(self.names)

    @staticmethod
    def generic(n_l):
        return LabelSet(tuple(f"label_{i}" for i in range(n_l)))


@dataclass
class SemanticNode:
    """Object centroid: semantic label, 3D position (m), supporting point count."""

    id: int
    label: int
    position: np.ndarray
    size: int

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        if self.position.shape != (3,):
            raise ValueError(f"node {self.id}: position must be a 3-vector")
        if not np.all(np.isfinite(self.position)):
            raise ValueError(f"node {self.id}: position must be finite")
        if self.label < 0:
            raise ValueError(f"node {self.id}: label must be non-negative")
        if self.size < 1:
            raise ValueError(f"node {self.id}: size must be >= 1")


class SemanticGraph:
    """Immutable semantic graph: nodes plus undirected proximity edges.

    An edge (i, j) exists iff the node distance is strictly below the
    connectivity threshold at build time.  Instances are safe to share
    across threads; build one with :func:`build_graph` or the JSON loader.
    """

    def __init__(self, label_set, nodes, edges, connectivity_threshold):
        self.label_set = label_set
        self.nodes = list(nodes)
        self.edges = frozenset(tuple(sorted(e)) for e in edges)
        self.connectivity_threshold = float(connectivity_threshold)

        n = len(self.nodes)
        ids = [nd.id for nd in self.nodes]
        if ids != list(range(n)):
            raise ValueError("node ids must be dense 0-based integers")
        for nd in self.nodes:
            if nd.label >= label_set.n_l:
                raise ValueError(f"node {nd.id}: label {nd.label} out of range "
                                 f"(n_l={label_set.n_l})")
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-edge on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) references missing node")

        self.positions = (np.stack([nd.position for nd in self.nodes])
                          if n else np.zeros((0, 3)))
        self.labels = np.array([nd.label for nd in self.nodes], dtype=int)
        self.sizes = np.array([nd.size for nd in self.nodes], dtype=int)
        self.neighbors = [[] for _ in range(n)]
        for a, b in sorted(self.edges):
            self.neighbors[a].append(b)
            self.neighbors[b].append(a)

    def __len__(self):
        return len(self.nodes)

    def degree(self, node_id):
        return len(self.neighbors[node_id])


def _pairwise_close(positions, threshold, strict):
    """Index pairs (i < j) whose distance is below (or at) threshold."""
    n = len(positions)
    if n < 2:
        return []
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    iu, ju = np.triu_indices(n, k=1)
    mask = dist[iu, ju] < threshold if strict else dist[iu, ju] <= threshold
    return list(zip(iu[mask].tolist(), ju[mask].tolist()))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def merge_nodes(nodes, merge_radius=DEFAULT_MERGE_RADIUS):
    """Merge same-label nodes that single-linkage within merge_radius.

    Merged position is the size-weighted mean, merged size the sum.
    Ids are reassigned densely.  Result is order-independent up to the
    id assignment.
    """
    if merge_radius < 0:
        raise ValueError("merge_radius must be >= 0")
    if not nodes:
        return []

    order = sorted(range(len(nodes)), key=lambda k: (nodes[k].label, tuple(nodes[k].position)))
    uf = _UnionFind(len(nodes))
    by_label = {}
    for k in order:
        by_label.setdefault(nodes[k].label, []).append(k)
    for label, idxs in by_label.items():
        pos = np.stack([nodes[k].position for k in idxs])
        for a, b in _pairwise_close(pos, merge_radius, strict=False):
            uf.union(idxs[a], idxs[b])

    clusters = {}
    for k in order:
        clusters.setdefault(uf.find(k), []).append(k)

    merged = []
    for members in clusters.values():
        sizes = np.array([nodes[k].size for k in members], dtype=float)
        pos = np.stack([nodes[k].position for k in members])
        centroid = (pos * sizes[:, None]).sum(axis=0) / sizes.sum()
        merged.append(SemanticNode(id=len(merged), label=nodes[members[0]].label,
                                   position=centroid, size=int(sizes.sum())))
    return merged


def build_graph(nodes, connectivity_threshold=DEFAULT_CONNECTIVITY, label_set=None):
    """Build an immutable graph whose edges are all node pairs strictly closer
    than the connectivity threshold."""
    if connectivity_threshold <= 0:
        raise ValueError("connectivity_threshold must be > 0")
    if label_set is None:
        n_l = max((nd.label for nd in nodes), default=0) + 1
        label_set = LabelSet.generic(n_l)
    renumbered = [SemanticNode(id=i, label=nd.label, position=nd.position, size=nd.size)
                  for i, nd in enumerate(nodes)]
    positions = np.stack([nd.position for nd in renumbered]) if renumbered else np.zeros((0, 3))
    edges = _pairwise_close(positions, connectivity_threshold, strict=True)
    return SemanticGraph(label_set, renumbered, edges, connectivity_threshold)


def save_graph(graph, path):
    doc = {
        "labels": list(graph.label_set.names),
        "connectivity_threshold": graph.connectivity_threshold,
        "nodes": [{"id": nd.id, "label": int(nd.label),
                   "position": [float(x) for x in nd.position],
                   "size": int(nd.size)}
                  for nd in graph.nodes],
        "edges": [[a, b] for a, b in sorted(graph.edges)],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_graph(path):
    """Load and fully validate a graph JSON file.

    Validation failures raise GraphFormatError naming the offending field.
    The stored edge set must exactly equal the strict-threshold edge set
    recomputed from the stored positions.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc

    if not isinstance(doc, dict):
        raise GraphFormatError("top-level value must be an object")
    for key in ("labels", "connectivity_threshold", "nodes", "edges"):
        if key not in doc:
            raise GraphFormatError("missing required key", key)

    try:
        label_set = LabelSet(tuple(doc["labels"]))
    except (TypeError, ValueError) as exc:
        raise GraphFormatError(str(exc), "labels") from exc

    threshold = doc["connectivity_threshold"]
    if not isinstance(threshold, (int, float)) or threshold <= 0:
        raise GraphFormatError("must be a positive number", "connectivity_threshold")

    nodes = []
    for idx, rec in enumerate(doc["nodes"]):
        where = f"nodes[{idx}]"
        if not isinstance(rec, dict):
            raise GraphFormatError("must be an object", where)
        for key in ("id", "label", "position", "size"):
            if key not in rec:
                raise GraphFormatError("missing required key", f"{where}.{key}")
        try:
            nodes.append(SemanticNode(id=rec["id"], label=rec["label"],
                                      position=rec["position"], size=rec["size"]))
        except (TypeError, ValueError) as exc:
            raise GraphFormatError(str(exc), where) from exc
    if [nd.id for nd in nodes] != list(range(len(nodes))):
        raise GraphFormatError("node ids must be dense 0-based and in order", "nodes")

    edges = []
    for idx, pair in enumerate(doc["edges"]):
        where = f"edges[{idx}]"
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(v, int) for v in pair)):
            raise GraphFormatError("must be a pair of node ids", where)
        edges.append(tuple(pair))

    try:
        graph = SemanticGraph(label_set, nodes, edges, threshold)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc

    expected = set(_pairwise_close(graph.positions, threshold, strict=True))
    if set(graph.edges) != expected:
        raise GraphFormatError("edge set inconsistent with positions and "
                               "connectivity_threshold", "edges")
    return graph
