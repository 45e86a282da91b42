"""Synthetic scenes and robot-view observations with known ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import SemanticNode
from .pose import RigidTransform

SIZE_RANGE = (5, 200)


@dataclass
class SceneSpec:
    extent: np.ndarray          # meters per axis, 3-vector
    object_count: int
    label_probs: np.ndarray     # per-label sampling probabilities, sums to 1
    seed: int = 0

    def __post_init__(self):
        self.extent = np.broadcast_to(np.asarray(self.extent, dtype=float), (3,)).copy()
        self.label_probs = np.asarray(self.label_probs, dtype=float)
        if self.object_count < 1:
            raise ValueError("object_count must be >= 1")
        if np.any(self.label_probs < 0) or abs(self.label_probs.sum() - 1.0) > 1e-9:
            raise ValueError("label_probs must be non-negative and sum to 1")


@dataclass
class ViewSpec:
    trajectory: np.ndarray      # (k,3) waypoints in scene coordinates
    sensor_range: float
    dropout: float = 0.0
    position_sigma: float = 0.0
    label_flip_prob: float = 0.0
    frame_offset: RigidTransform = field(default_factory=RigidTransform.identity)
    seed: int = 0

    def __post_init__(self):
        self.trajectory = np.asarray(self.trajectory, dtype=float).reshape(-1, 3)
        if self.sensor_range <= 0:
            raise ValueError("sensor_range must be > 0")
        for name in ("dropout", "label_flip_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.position_sigma < 0:
            raise ValueError("position_sigma must be >= 0")


def generate_scene(spec):
    """Sample object nodes uniformly inside the extent; deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    n = spec.object_count
    positions = rng.uniform(0.0, 1.0, size=(n, 3)) * spec.extent
    labels = rng.choice(len(spec.label_probs), size=n, p=spec.label_probs)
    sizes = rng.integers(SIZE_RANGE[0], SIZE_RANGE[1] + 1, size=n)
    return [SemanticNode(id=i, label=int(labels[i]), position=positions[i],
                         size=int(sizes[i]))
            for i in range(n)]


def observe(scene, view):
    """Observe a scene along a trajectory, in the observer's own frame.

    Keeps objects within sensor_range of any waypoint, applies dropout,
    position noise, and uniform label flips, then maps positions through the
    inverse of the frame offset (so recovering the offset aligns the
    observation back onto the scene). Deterministic per seed.
    """
    rng = np.random.default_rng(view.seed)
    n_l = max(nd.label for nd in scene) + 1 if scene else 1
    inv = view.frame_offset.inverse()

    out = []
    for nd in scene:
        dist = np.min(np.linalg.norm(view.trajectory - nd.position, axis=1))
        if dist >= view.sensor_range:
            continue
        if view.dropout > 0 and rng.random() < view.dropout:
            continue
        position = nd.position.copy()
        if view.position_sigma > 0:
            position = position + rng.normal(0.0, view.position_sigma, size=3)
        label = nd.label
        if view.label_flip_prob > 0 and rng.random() < view.label_flip_prob:
            label = int(rng.integers(n_l))
        out.append(SemanticNode(id=len(out), label=label,
                                position=inv.apply(position), size=nd.size))
    return out


def random_offset(rng, translation_scale=100.0):
    """Uniform random rotation plus a uniform translation in a cube."""
    # quaternion -> rotation, uniform over SO(3)
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    R = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])
    t = rng.uniform(-translation_scale, translation_scale, size=3)
    return RigidTransform(R, t)


def grid_trajectory(extent, spacing=50.0, height=0.0):
    """Serpentine waypoint grid covering the x/y footprint of the extent."""
    extent = np.broadcast_to(np.asarray(extent, dtype=float), (3,))
    xs = np.arange(0.0, extent[0] + spacing, spacing)
    ys = np.arange(0.0, extent[1] + spacing, spacing)
    pts = []
    for row, y in enumerate(ys):
        run = xs if row % 2 == 0 else xs[::-1]
        pts.extend([x, y, height] for x in run)
    return np.array(pts)
