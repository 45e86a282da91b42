"""Run configuration: defaults, key=value config files, and CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import descriptors, graph, extraction, matching


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Pipeline knobs. Precedence: CLI flags > config file > these defaults."""

    connectivity_threshold: float = graph.DEFAULT_CONNECTIVITY
    merge_radius: float = graph.DEFAULT_MERGE_RADIUS
    cluster_distance: float = extraction.DEFAULT_CLUSTER_DISTANCE
    min_cluster_size: int = extraction.DEFAULT_MIN_CLUSTER_SIZE
    score_threshold: float = matching.DEFAULT_SCORE_THRESHOLD
    ransac_tolerance: float = matching.DEFAULT_RANSAC_TOLERANCE
    ransac_iterations: int = matching.DEFAULT_RANSAC_ITERATIONS
    descriptor: str = descriptors.HISTOGRAM
    walk_count: int = descriptors.DEFAULT_WALK_COUNT
    walk_depth: int = descriptors.DEFAULT_WALK_DEPTH
    path_length: int = descriptors.PATH_LENGTH
    same_label_only: bool = True
    seed: int = 0
    localization_threshold: float = 20.0   # T_p, meters
    good_match_radius: float = 10.0        # half of T_p
    threads: int = 0                       # 0 = use available cores

    def __post_init__(self):
        for name in ("connectivity_threshold", "merge_radius", "cluster_distance",
                     "ransac_tolerance", "localization_threshold", "good_match_radius"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        for name in ("connectivity_threshold", "cluster_distance",
                     "ransac_tolerance", "localization_threshold", "good_match_radius"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 <= self.score_threshold <= 1.0:
            raise ConfigError("score_threshold must be in [0, 1]")
        if self.min_cluster_size < 1 or self.ransac_iterations < 1:
            raise ConfigError("min_cluster_size and ransac_iterations must be >= 1")
        if self.descriptor not in descriptors.DESCRIPTOR_KINDS:
            raise ConfigError(f"descriptor must be one of {descriptors.DESCRIPTOR_KINDS}")
        if self.walk_count < 1 or self.walk_depth < 2:
            raise ConfigError("walk_count must be >= 1 and walk_depth >= 2")


# synthetic-experiment keys accepted alongside RunConfig keys in config files
SYNTH_KEYS = {
    "extent": str,
    "object_count": int,
    "label_count": int,
    "label_probs": str,
    "sensor_range": float,
    "dropout": float,
    "position_sigma": float,
    "label_flip_prob": float,
    "trajectory_spacing": float,
    "offset_translation": float,
    "attempts": int,
    "window_waypoints": int,
    "tr_values": str,
    "repetitions": int,
}

SYNTH_DEFAULTS = {
    "extent": "200,200,20",
    "object_count": 200,
    "label_count": 8,
    "label_probs": "",
    "sensor_range": 80.0,
    "dropout": 0.0,
    "position_sigma": 0.0,
    "label_flip_prob": 0.0,
    "trajectory_spacing": 40.0,
    "offset_translation": 100.0,
    "attempts": 20,
    "window_waypoints": 8,
    "tr_values": "0,2,4,6,8,10,15,20,30,50",
    "repetitions": 5,
}

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name, kind, raw):
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"config key {name}: {exc}") from exc


def parse_config_file(path):
    """Parse a key=value config file; `#` comments, unknown keys rejected."""
    run_types = {f.name: f.type for f in fields(RunConfig)}
    # dataclass field types are strings under future annotations
    type_map = {"float": float, "int": int, "str": str, "bool": bool}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key in run_types:
                kind = type_map[run_types[key]] if isinstance(run_types[key], str) else run_types[key]
                values[key] = _coerce(key, kind, value)
            elif key in SYNTH_KEYS:
                values[key] = _coerce(key, SYNTH_KEYS[key], value)
            else:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
    return values


def build_run_config(file_values=None, overrides=None):
    """Layer file values over defaults, then explicit overrides on top."""
    run_fields = {f.name for f in fields(RunConfig)}
    merged = {}
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if key in run_fields and value is not None:
                merged[key] = value
    return RunConfig(**merged)


def build_synth_config(file_values=None, overrides=None):
    merged = dict(SYNTH_DEFAULTS)
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if key in SYNTH_DEFAULTS and value is not None:
                merged[key] = value
    return merged


def parse_float_list(text):
    return [float(v) for v in text.split(",") if v.strip() != ""]


def parse_int_list(text):
    return [int(v) for v in text.split(",") if v.strip() != ""]
