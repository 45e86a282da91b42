"""Command-line interface: localize, extract, synth, eval-pr, bench."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import (config, descriptors, evaluation, extraction, graph, matching,
               pipeline, plotting, pose, synth)

log = logging.getLogger("semloc")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INSUFFICIENT = 3
EXIT_DEGENERATE = 4
EXIT_IO = 5


class CliError(Exception):
    def __init__(self, category, exit_code, message):
        self.category = category
        self.exit_code = exit_code
        super().__init__(message)


def _setup_logging():
    level = os.environ.get("SEMLOC_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_input(path, cfg, drop_labels):
    """Accept a graph JSON file or an `x y z label` point file."""
    path = Path(path)
    if not path.exists():
        raise CliError("io", EXIT_IO, f"input not found: {path}")
    if path.suffix == ".json":
        try:
            g = graph.load_graph(path)
        except graph.GraphFormatError as exc:
            raise CliError("parse", EXIT_PARSE, f"{path}: {exc}") from exc
        if drop_labels:
            nodes = [nd for nd in g.nodes if nd.label not in set(drop_labels)]
            return pipeline.build_semantic_graph(nodes, cfg)
        return g
    try:
        positions, labels = extraction.load_points(path)
    except extraction.PointFormatError as exc:
        raise CliError("parse", EXIT_PARSE, f"{path}: {exc}") from exc
    nodes = extraction.extract_nodes(positions, labels, cfg.cluster_distance,
                                     cfg.min_cluster_size)
    return pipeline.build_semantic_graph(nodes, cfg, drop_labels=drop_labels)


def _configure(args):
    file_values = {}
    if args.config:
        try:
            file_values = config.parse_config_file(args.config)
        except (OSError, config.ConfigError) as exc:
            raise CliError("config", EXIT_PARSE, str(exc)) from exc
    overrides = {
        "connectivity_threshold": args.connectivity,
        "score_threshold": args.score_threshold,
        "ransac_iterations": args.ransac_iters,
        "ransac_tolerance": args.ransac_tol,
        "descriptor": args.descriptor,
        "seed": args.seed,
        "threads": args.threads,
        "same_label_only": False if getattr(args, "all_labels", False) else None,
        "path_length": getattr(args, "path_length", None),
    }
    try:
        run_cfg = config.build_run_config(file_values, overrides)
    except config.ConfigError as exc:
        raise CliError("config", EXIT_PARSE, str(exc)) from exc
    synth_cfg = config.build_synth_config(file_values)
    return run_cfg, synth_cfg


def _out_dir(args):
    out = Path(args.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".writable"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise CliError("io", EXIT_IO, f"output dir not writable: {out}: {exc}") from exc
    return out


def _drop_labels(args):
    if not getattr(args, "drop_labels", None):
        return ()
    try:
        return tuple(config.parse_int_list(args.drop_labels))
    except ValueError as exc:
        raise CliError("config", EXIT_PARSE, f"--drop-labels: {exc}") from exc


def cmd_localize(args):
    run_cfg, _ = _configure(args)
    drop = _drop_labels(args)
    out = _out_dir(args)
    reference = _load_input(args.reference, run_cfg, drop)
    query = _load_input(args.query, run_cfg, drop)
    query, reference = pipeline.harmonize_label_sets(query, reference)

    try:
        result = pipeline.localize(query, reference, run_cfg)
    except matching.InsufficientCandidatesError as exc:
        raise CliError("insufficient-candidates", EXIT_INSUFFICIENT, str(exc)) from exc
    except pose.DegenerateGeometryError as exc:
        raise CliError("degenerate-geometry", EXIT_DEGENERATE, str(exc)) from exc

    pose.save_transform(result.transform, out / "transform.json")
    pose.save_transform_homogeneous(result.transform, out / "transform.txt")
    matching.dump_matches_csv(result.candidates, result.inliers, query,
                              out / "matches.csv")
    plotting.plot_matches(query, reference, result.inliers, result.transform,
                          out / "matches.png")

    summary = {
        "candidates": len(result.candidates),
        "inliers": result.inlier_count,
        "query_nodes": len(query),
        "reference_nodes": len(reference),
    }
    if args.ground_truth:
        gt = pose.load_transform(args.ground_truth)
        stats = evaluation.good_match_stats(result.inliers, query.positions,
                                            reference.positions, gt,
                                            radius=run_cfg.good_match_radius)
        summary["good_matches"] = stats.good
        summary["good_match_rate"] = stats.rate
        summary["translation_error_m"] = float(np.linalg.norm(result.transform.t - gt.t))
        summary["rotation_error_deg"] = pose.rotation_angle_deg(result.transform.R @ gt.R.T)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(out / "timings.json", "w") as fh:
        json.dump(result.timings_ms, fh, indent=1, sort_keys=True)
        fh.write("\n")

    print(f"inliers: {result.inlier_count} / {len(result.candidates)} candidates")
    for name in ("transform.json", "transform.txt", "matches.csv", "matches.png",
                 "summary.json", "timings.json"):
        print(out / name)
    return EXIT_OK


def cmd_extract(args):
    run_cfg, _ = _configure(args)
    out = _out_dir(args)
    g = _load_input(args.input, run_cfg, _drop_labels(args))
    graph.save_graph(g, out / "graph.json")
    descs = descriptors.extract_descriptors(
        g, kind=run_cfg.descriptor, walk_count=run_cfg.walk_count,
        walk_depth=run_cfg.walk_depth, seed=run_cfg.seed,
        path_length=run_cfg.path_length)
    if run_cfg.descriptor != descriptors.WALK:
        descriptors.dump_descriptors_csv(descs, out / "descriptors.csv")
        print(out / "descriptors.csv")
    print(out / "graph.json")
    return EXIT_OK


def _synth_pair(run_cfg, synth_cfg):
    """Scene, a full reference view, and an offset query view."""
    rng = np.random.default_rng(run_cfg.seed)
    extent = config.parse_float_list(synth_cfg["extent"])
    n_l = int(synth_cfg["label_count"])
    probs = (config.parse_float_list(synth_cfg["label_probs"])
             if synth_cfg["label_probs"] else [1.0 / n_l] * n_l)
    spec = synth.SceneSpec(extent=extent, object_count=int(synth_cfg["object_count"]),
                           label_probs=probs, seed=run_cfg.seed)
    scene = synth.generate_scene(spec)
    trajectory = synth.grid_trajectory(extent, spacing=float(synth_cfg["trajectory_spacing"]))
    offset = synth.random_offset(rng, translation_scale=float(synth_cfg["offset_translation"]))

    ref_view = synth.ViewSpec(trajectory=trajectory,
                              sensor_range=float(synth_cfg["sensor_range"]),
                              seed=run_cfg.seed + 1)
    qry_view = synth.ViewSpec(trajectory=trajectory,
                              sensor_range=float(synth_cfg["sensor_range"]),
                              dropout=float(synth_cfg["dropout"]),
                              position_sigma=float(synth_cfg["position_sigma"]),
                              label_flip_prob=float(synth_cfg["label_flip_prob"]),
                              frame_offset=offset, seed=run_cfg.seed + 2)
    return scene, synth.observe(scene, ref_view), synth.observe(scene, qry_view), offset


def cmd_synth(args):
    run_cfg, synth_cfg = _configure(args)
    out = _out_dir(args)
    scene, ref_nodes, qry_nodes, offset = _synth_pair(run_cfg, synth_cfg)
    graph.save_graph(pipeline.build_semantic_graph(scene, run_cfg), out / "scene.json")
    graph.save_graph(pipeline.build_semantic_graph(ref_nodes, run_cfg),
                     out / "reference.json")
    graph.save_graph(pipeline.build_semantic_graph(qry_nodes, run_cfg),
                     out / "query.json")
    pose.save_transform(offset, out / "ground_truth.json")
    for name in ("scene.json", "reference.json", "query.json", "ground_truth.json"):
        print(out / name)
    return EXIT_OK


def cmd_eval_pr(args):
    run_cfg, synth_cfg = _configure(args)
    out = _out_dir(args)
    threads = run_cfg.threads if run_cfg.threads > 0 else (os.cpu_count() or 1)
    attempts = evaluation.generate_attempts(
        run_cfg, synth_cfg, attempt_count=int(synth_cfg["attempts"]),
        window_waypoints=int(synth_cfg["window_waypoints"]),
        base_seed=run_cfg.seed, threads=threads)
    tr_values = config.parse_int_list(synth_cfg["tr_values"])
    points = evaluation.pr_curve(attempts, run_cfg.localization_threshold, tr_values)
    evaluation.write_pr_csv(points, out / "pr_curve.csv")
    plotting.plot_pr_curve(points, out / "pr_curve.png")
    print(out / "pr_curve.csv")
    print(out / "pr_curve.png")
    return EXIT_OK


def cmd_bench(args):
    run_cfg, synth_cfg = _configure(args)
    out = _out_dir(args)
    if args.reference and args.query:
        reference = _load_input(args.reference, run_cfg, ())
        query = _load_input(args.query, run_cfg, ())
        query, reference = pipeline.harmonize_label_sets(query, reference)
    else:
        _, ref_nodes, qry_nodes, _ = _synth_pair(run_cfg, synth_cfg)
        reference = pipeline.build_semantic_graph(ref_nodes, run_cfg)
        query = pipeline.build_semantic_graph(qry_nodes, run_cfg)
    try:
        report = evaluation.bench(query, reference, run_cfg,
                                  repetitions=int(synth_cfg["repetitions"]))
    except matching.InsufficientCandidatesError as exc:
        raise CliError("insufficient-candidates", EXIT_INSUFFICIENT, str(exc)) from exc
    evaluation.write_bench_json(report, out / "timings.json")
    plotting.plot_bench(report, out / "timings.png")
    print(evaluation.format_bench(report))
    print(out / "timings.json")
    print(out / "timings.png")
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads; 1 forces serial execution")
    parser.add_argument("--connectivity", type=float, default=None,
                        help="edge distance threshold (m)")
    parser.add_argument("--score-threshold", type=float, default=None)
    parser.add_argument("--ransac-iters", type=int, default=None)
    parser.add_argument("--ransac-tol", type=float, default=None)
    parser.add_argument("--descriptor", choices=list(descriptors.DESCRIPTOR_KINDS),
                        default=None)
    parser.add_argument("--drop-labels", default=None,
                        help="comma-separated label ids to remove before graph build")
    parser.add_argument("--all-labels", action="store_true",
                        help="compare descriptors across different labels too")
    parser.add_argument("--path-length", type=int, default=None,
                        help="histogram path length (2, 3, or 4)")
    parser.add_argument("--output", default="out", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="semloc",
        description="Semantic-graph global localization between map frames")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("localize", help="estimate the query->reference transform")
    p.add_argument("reference", help="reference graph JSON or point file")
    p.add_argument("query", help="query graph JSON or point file")
    p.add_argument("--ground-truth", help="transform JSON for error reporting")
    _add_common(p)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("extract", help="build a semantic graph from a point file")
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("synth", help="generate a synthetic scene and view pair")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval-pr", help="run synthetic localization attempts and emit a PR curve")
    _add_common(p)
    p.set_defaults(func=cmd_eval_pr)

    p = sub.add_parser("bench", help="time the pipeline stages")
    p.add_argument("reference", nargs="?", default=None)
    p.add_argument("query", nargs="?", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: category={exc.category}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: category=io: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
