"""Descriptor scoring, candidate correspondence search, and RANSAC rejection."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import descriptors as desc_mod
from . import pose

DEFAULT_SCORE_THRESHOLD = 0.5
DEFAULT_RANSAC_ITERATIONS = 500
DEFAULT_RANSAC_TOLERANCE = 5.0

MINIMAL_SAMPLE = 4


class InsufficientCandidatesError(ValueError):
    """Fewer candidate correspondences than the minimal RANSAC sample."""


@dataclass(frozen=True)
class Correspondence:
    id_a: int
    id_b: int
    similarity: float


@dataclass
class MatchResult:
    inliers: list           # surviving correspondences
    transform: pose.RigidTransform  # best minimal-sample model
    inlier_count: int

    def __post_init__(self):
        assert self.inlier_count == len(self.inliers)


def score(a, b):
    """Cosine similarity of two non-negative count vectors; 0 if either is zero."""
    va = np.asarray(a.counts if hasattr(a, "counts") else a, dtype=float)
    vb = np.asarray(b.counts if hasattr(b, "counts") else b, dtype=float)
    if va.shape != vb.shape:
        raise ValueError(f"descriptor length mismatch: {va.shape} vs {vb.shape}")
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(va, vb) / (na * nb))


def candidate_matches(descs_a, descs_b, graph_a, graph_b, score_threshold=DEFAULT_SCORE_THRESHOLD,
                      same_label_only=True, walk_count=desc_mod.DEFAULT_WALK_COUNT):
    """All cross-graph node pairs scoring strictly above the threshold.

    By default only same-label pairs are compared; many-to-many matches are
    allowed and left for RANSAC consistency to prune.
    """
    if len(descs_a) != len(graph_a) or len(descs_b) != len(graph_b):
        raise ValueError("descriptor lists must cover every graph node")

    is_walk = bool(descs_a) and isinstance(descs_a[0], desc_mod.WalkDescriptor)
    out = []

    if is_walk:
        for i, da in enumerate(descs_a):
            for j, db in enumerate(descs_b):
                if same_label_only and graph_a.labels[i] != graph_b.labels[j]:
                    continue
                s = desc_mod.walk_similarity(da, db, walk_count)
                if s > score_threshold:
                    out.append(Correspondence(i, j, s))
        return out

    A = np.stack([d.counts for d in descs_a]).astype(float) if descs_a else np.zeros((0, 1))
    B = np.stack([d.counts for d in descs_b]).astype(float) if descs_b else np.zeros((0, 1))
    if descs_a and descs_b and A.shape[1] != B.shape[1]:
        raise ValueError(f"descriptor length mismatch: {A.shape[1]} vs {B.shape[1]}")
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    sim = A @ B.T
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = sim / np.outer(na, nb)
    sim[np.outer(na == 0, nb == 0) | np.isnan(sim)] = 0.0
    sim[na == 0, :] = 0.0
    sim[:, nb == 0] = 0.0

    keep = sim > score_threshold
    if same_label_only:
        keep &= graph_a.labels[:, None] == graph_b.labels[None, :]
    for i, j in zip(*np.nonzero(keep)):
        out.append(Correspondence(int(i), int(j), float(sim[i, j])))
    return out


def _sample_degenerate(pts):
    """True if 4 points are coincident/collinear within 1e-6 (rank < 2)."""
    sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    return sv[1] < 1e-6


def ransac_filter(candidates, positions_a, positions_b, iterations=DEFAULT_RANSAC_ITERATIONS,
                  tolerance=DEFAULT_RANSAC_TOLERANCE, seed=0):
    """Minimal 4-sample RANSAC over candidate correspondences.

    Each iteration samples 4 distinct candidates, solves the unweighted rigid
    fit, and counts candidates with residual < tolerance; the largest inlier
    set wins (first found on ties). Degenerate samples count against the
    iteration budget. Deterministic for a fixed seed.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if tolerance <= 0:
        raise ValueError("tolerance must be > 0")
    if len(candidates) < MINIMAL_SAMPLE:
        raise InsufficientCandidatesError(
            f"need at least {MINIMAL_SAMPLE} candidates, got {len(candidates)}")

    positions_a = np.asarray(positions_a, dtype=float)
    positions_b = np.asarray(positions_b, dtype=float)
    P = positions_a[[c.id_a for c in candidates]]
    Q = positions_b[[c.id_b for c in candidates]]

    rng = np.random.default_rng(seed)
    best_mask = None
    best_count = 0
    best_model = None
    for _ in range(iterations):
        pick = rng.choice(len(candidates), size=MINIMAL_SAMPLE, replace=False)
        if _sample_degenerate(P[pick]) or _sample_degenerate(Q[pick]):
            continue
        try:
            model = pose.solve_rigid(P[pick], Q[pick])
        except pose.DegenerateGeometryError:
            continue
        mask = pose.residuals(P, Q, model) < tolerance
        count = int(mask.sum())
        if count > best_count:
            best_mask = mask
            best_count = count
            best_model = model

    if best_model is None:
        raise pose.DegenerateGeometryError(
            "every sampled minimal set was degenerate")

    inliers = [c for c, keep in zip(candidates, best_mask) if keep]
    assert np.all(pose.residuals(P[best_mask], Q[best_mask], best_model) < tolerance)
    return MatchResult(inliers=inliers, transform=best_model, inlier_count=best_count)


def dump_matches_csv(candidates, inliers, graph_a, path):
    """Match dump: idA, idB, label, score, inlier(0/1)."""
    inlier_keys = {(c.id_a, c.id_b) for c in inliers}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["idA", "idB", "label", "score", "inlier"])
        for c in candidates:
            writer.writerow([c.id_a, c.id_b, int(graph_a.labels[c.id_a]),
                             repr(c.similarity), int((c.id_a, c.id_b) in inlier_keys)])
