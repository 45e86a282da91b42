"""Figure rendering for the report path (file output only, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.8),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def plot_pr_curve(points, path, title="Precision-Recall"):
    """Render a PR curve to an image file; flagged points are skipped."""
    shown = [p for p in points if not p.flagged]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot([p.recall for p in shown], [p.precision for p in shown],
                marker="o", lw=1.2)
        for p in shown:
            ax.annotate(str(p.vote_threshold), (p.recall, p.precision),
                        textcoords="offset points", xytext=(4, 4), fontsize=7)
        ax.set_xlabel("Recall")
        ax.set_ylabel("Precision")
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_bench(report, path, title="Per-stage timing"):
    """Render per-stage mean/std timing bars to an image file."""
    stages = [s for s in ("graph", "descriptor", "matching", "pose") if s in report]
    means = [report[s]["mean_ms"] for s in stages]
    stds = [report[s]["std_ms"] for s in stages]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(stages, means, yerr=stds, capsize=3)
        ax.set_ylabel("Time (ms)")
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_matches(query_graph, reference_graph, inliers, transform, path,
                 title="Inlier correspondences"):
    """Top-down scatter of both graphs with inlier links, query transformed."""
    q = transform.apply(query_graph.positions)
    r = reference_graph.positions
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.scatter(r[:, 0], r[:, 1], s=12, c="tab:blue", label="reference")
        ax.scatter(q[:, 0], q[:, 1], s=12, c="tab:orange", marker="x",
                   label="query (aligned)")
        for c in inliers:
            ax.plot([q[c.id_a, 0], r[c.id_b, 0]], [q[c.id_a, 1], r[c.id_b, 1]],
                    c="gray", lw=0.5, alpha=0.6)
        ax.set_xlabel("x (m)")
        ax.set_ylabel("y (m)")
        ax.set_aspect("equal")
        ax.legend(fontsize=7)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
