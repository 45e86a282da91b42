"""Closed-form weighted rigid registration (Kabsch with reflection fix)."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

DEGENERACY_TOL = 1e-6


class DegenerateGeometryError(ValueError):
    """Source points are collinear or coincident; rotation is not determined."""


@dataclass(frozen=True)
class RigidTransform:
    """Rotation R (3x3, det +1) and translation t, q = R p + t."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float).reshape(3, 3))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float).reshape(3))
        if np.linalg.norm(self.R.T @ self.R - np.eye(3)) > 1e-8:
            raise ValueError("R is not orthonormal")
        if np.linalg.det(self.R) < 0:
            raise ValueError("R must be a proper rotation (det +1)")

    @staticmethod
    def identity():
        return RigidTransform(np.eye(3), np.zeros(3))

    def apply(self, p):
        """Map point(s) p: returns R p + t. Accepts (3,) or (n,3)."""
        p = np.asarray(p, dtype=float)
        return p @ self.R.T + self.t

    def inverse(self):
        return RigidTransform(self.R.T, -self.R.T @ self.t)

    def compose(self, other):
        """Returns self ∘ other (apply other first)."""
        return RigidTransform(self.R @ other.R, self.R @ other.t + self.t)

    def matrix(self):
        m = np.eye(4)
        m[:3, :3] = self.R
        m[:3, 3] = self.t
        return m


def residual(p, q, transform):
    """Euclidean distance between q and the transformed p."""
    return float(np.linalg.norm(np.asarray(q, dtype=float) - transform.apply(p)))


def residuals(P, Q, transform):
    """Vectorized residual over (n,3) arrays."""
    return np.linalg.norm(np.asarray(Q, dtype=float) - transform.apply(P), axis=-1)


def solve_rigid(P, Q, weights=None):
    """Weighted least-squares rigid fit: minimize sum w_k ||q_k - R p_k - t||^2.

    Weighted centroiding + SVD of the weighted cross-covariance; the smallest
    singular direction is sign-flipped when needed so det(R) = +1.
    """
    P = np.asarray(P, dtype=float).reshape(-1, 3)
    Q = np.asarray(Q, dtype=float).reshape(-1, 3)
    if P.shape != Q.shape:
        raise ValueError("point sets must have equal shapes")
    n = len(P)
    if n < 3:
        raise ValueError("need at least 3 point pairs")
    if weights is None:
        weights = np.ones(n)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if len(w) != n:
        raise ValueError("weights length must match point count")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if w.sum() <= 0:
        raise ValueError("weights must not all be zero")
    w = w / w.sum()

    cp = w @ P
    cq = w @ Q
    Pc = P - cp
    Qc = Q - cq

    sv = np.linalg.svd(Pc * w[:, None], compute_uv=False)
    if sv[1] < DEGENERACY_TOL * max(sv[0], 1.0):
        raise DegenerateGeometryError("source points are collinear or coincident")

    H = (Pc * w[:, None]).T @ Qc
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    R = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T
    t = cq - R @ cp
    return RigidTransform(R, t)


def objective(P, Q, weights, transform):
    """The weighted sum-of-squares value the solver minimizes (weights as given)."""
    w = np.asarray(weights, dtype=float)
    r = residuals(P, Q, transform)
    return float(np.sum(w * r ** 2))


def rotation_angle_deg(R):
    """Rotation angle of a rotation matrix, in degrees."""
    c = (np.trace(R) - 1.0) / 2.0
    return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


def save_transform(transform, path):
    doc = {"R": [[float(v) for v in row] for row in transform.R],
           "t": [float(v) for v in transform.t]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_transform(path):
    with open(path) as fh:
        doc = json.load(fh)
    return RigidTransform(np.array(doc["R"]), np.array(doc["t"]))


def save_transform_homogeneous(transform, path):
    """4x4 row-major homogeneous matrix, one row per line."""
    with open(path, "w") as fh:
        for row in transform.matrix():
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_transform_homogeneous(path):
    m = np.loadtxt(path)
    if m.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    return RigidTransform(m[:3, :3], m[:3, 3])
