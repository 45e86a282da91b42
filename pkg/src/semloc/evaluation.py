"""Evaluation harness: PR curves, good-match statistics, and stage timing."""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import pipeline, pose, synth

log = logging.getLogger(__name__)

DEFAULT_LOCALIZATION_THRESHOLD = 20.0  # T_p, meters
DEFAULT_GOOD_MATCH_RADIUS = 10.0


@dataclass
class LocalizationAttempt:
    estimate: pose.RigidTransform
    ground_truth: pose.RigidTransform
    inlier_count: int
    timings_ms: dict = field(default_factory=dict)

    @property
    def translation_error(self):
        return float(np.linalg.norm(self.estimate.t - self.ground_truth.t))

    @property
    def rotation_error_deg(self):
        return pose.rotation_angle_deg(self.estimate.R @ self.ground_truth.R.T)


@dataclass
class PRPoint:
    vote_threshold: int    # T_r, minimum inlier count for a positive vote
    precision: float
    recall: float
    flagged: bool = False  # True when no attempt voted positive


def pr_curve(attempts, localization_threshold=DEFAULT_LOCALIZATION_THRESHOLD,
             vote_thresholds=()):
    """One PR point per vote threshold.

    An attempt votes positive iff its inlier count reaches the threshold;
    precision is the fraction of positives whose translation error is below
    the localization threshold, recall the fraction of attempts voting
    positive. Thresholds with zero positives are flagged (precision 0).
    """
    if not attempts:
        raise ValueError("attempts must be non-empty")
    counts = np.array([a.inlier_count for a in attempts])
    correct = np.array([a.translation_error < localization_threshold for a in attempts])
    points = []
    for tr in vote_thresholds:
        positive = counts >= tr
        n_pos = int(positive.sum())
        if n_pos == 0:
            points.append(PRPoint(int(tr), 0.0, 0.0, flagged=True))
            continue
        precision = float((positive & correct).sum() / n_pos)
        recall = n_pos / len(attempts)
        points.append(PRPoint(int(tr), precision, recall))
    return points


@dataclass
class GoodMatchStats:
    good: int
    total: int
    rate: float
    flagged: bool = False  # True for an empty correspondence set


def good_match_stats(inliers, positions_a, positions_b, ground_truth,
                     radius=DEFAULT_GOOD_MATCH_RADIUS):
    """Count correspondences consistent with the ground truth within radius."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    if not inliers:
        return GoodMatchStats(good=0, total=0, rate=0.0, flagged=True)
    P = np.asarray(positions_a)[[c.id_a for c in inliers]]
    Q = np.asarray(positions_b)[[c.id_b for c in inliers]]
    good = int((pose.residuals(P, Q, ground_truth) < radius).sum())
    return GoodMatchStats(good=good, total=len(inliers), rate=good / len(inliers))


def write_pr_csv(points, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["T_r", "precision", "recall", "flagged"])
        for p in points:
            writer.writerow([p.vote_threshold, repr(p.precision), repr(p.recall),
                             int(p.flagged)])


def generate_attempts(run_cfg, synth_cfg, attempt_count, window_waypoints=8,
                      base_seed=0, threads=1):
    """Desk-scale localization attempts against a common reference scene.

    One synthetic scene is observed fully (identity frame) as the reference;
    each attempt observes a sliding window of the trajectory under a common
    random frame offset, then localizes the window graph against the full
    reference graph.
    """
    from .config import parse_float_list

    rng = np.random.default_rng(base_seed)
    extent = parse_float_list(synth_cfg["extent"])
    n_l = int(synth_cfg["label_count"])
    probs = (parse_float_list(synth_cfg["label_probs"])
             if synth_cfg["label_probs"] else [1.0 / n_l] * n_l)
    scene_spec = synth.SceneSpec(extent=extent, object_count=int(synth_cfg["object_count"]),
                                 label_probs=probs, seed=base_seed)
    scene = synth.generate_scene(scene_spec)
    trajectory = synth.grid_trajectory(extent, spacing=float(synth_cfg["trajectory_spacing"]))

    ref_view = synth.ViewSpec(trajectory=trajectory,
                              sensor_range=float(synth_cfg["sensor_range"]),
                              seed=base_seed)
    reference = pipeline.build_semantic_graph(synth.observe(scene, ref_view), run_cfg)
    offset = synth.random_offset(rng, translation_scale=float(synth_cfg["offset_translation"]))

    starts = rng.integers(0, max(1, len(trajectory) - window_waypoints),
                          size=attempt_count)

    def run_one(k):
        window = trajectory[starts[k]: starts[k] + window_waypoints]
        view = synth.ViewSpec(trajectory=window,
                              sensor_range=float(synth_cfg["sensor_range"]),
                              dropout=float(synth_cfg["dropout"]),
                              position_sigma=float(synth_cfg["position_sigma"]),
                              label_flip_prob=float(synth_cfg["label_flip_prob"]),
                              frame_offset=offset, seed=base_seed + 1000 + k)
        query = pipeline.build_semantic_graph(synth.observe(scene, view), run_cfg)
        try:
            result = pipeline.localize(query, reference, run_cfg)
        except (ValueError, pose.DegenerateGeometryError):
            return LocalizationAttempt(estimate=pose.RigidTransform.identity(),
                                       ground_truth=offset, inlier_count=0)
        return LocalizationAttempt(estimate=result.transform, ground_truth=offset,
                                   inlier_count=result.inlier_count,
                                   timings_ms=result.timings_ms)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run_one, range(attempt_count)))
    return [run_one(k) for k in range(attempt_count)]


def bench(query_graph, reference_graph, run_cfg, repetitions=5):
    """Wall-clock mean/std per pipeline stage over repeated runs.

    Graph build time is measured by rebuilding the query graph from its own
    node list each repetition.
    """
    if repetitions < 3:
        raise ValueError("repetitions must be >= 3")
    samples = {stage: [] for stage in ("graph", "descriptor", "matching", "pose")}
    for _ in range(repetitions):
        start = time.perf_counter()
        pipeline.build_semantic_graph(query_graph.nodes, run_cfg)
        samples["graph"].append((time.perf_counter() - start) * 1e3)
        result = pipeline.localize(query_graph, reference_graph, run_cfg)
        for stage in ("descriptor", "matching", "pose"):
            samples[stage].append(result.timings_ms[stage])

    report = {}
    total_mean = 0.0
    for stage, values in samples.items():
        arr = np.array(values)
        report[stage] = {"mean_ms": float(arr.mean()), "std_ms": float(arr.std()),
                         "samples_ms": [float(v) for v in values]}
        total_mean += float(arr.mean())
    report["total"] = {"mean_ms": total_mean, "repetitions": repetitions}
    return report


def write_bench_json(report, path):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
        fh.write("\n")


def format_bench(report):
    lines = []
    for stage in ("graph", "descriptor", "matching", "pose"):
        entry = report[stage]
        lines.append(f"{stage:>10}: {entry['mean_ms']:8.2f} ms +- {entry['std_ms']:.2f}")
    lines.append(f"{'total':>10}: {report['total']['mean_ms']:8.2f} ms "
                 f"({report['total']['repetitions']} repetitions)")
    return "\n".join(lines)
