"""Optional figure rendering for CLI reports.

Figures are a convenience layer over the delimited plot data the CLI always
writes; nothing downstream depends on them.  Matplotlib is imported lazily with
the Agg backend so headless runs never touch a display.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import FoldChangeSet


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_cluster_panels(directory, fcs: FoldChangeSet, labels, warps, centroids) -> list[Path]:
    """One PNG per cluster: unaligned means on the left, aligned on the right."""
    plt = _plt()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    points = fcs.time.array
    p = len(points)
    labels = np.asarray(labels)
    written = []
    for k in range(int(labels.max()) + 1):
        members = np.flatnonzero(labels == k)
        fig, (ax_u, ax_a) = plt.subplots(1, 2, figsize=(9, 3.2), sharey=True)
        for i in members:
            is_centroid = int(centroids[k]) == int(i)
            style = dict(
                color="black" if is_centroid else "tab:blue",
                lw=2.0 if is_centroid else 0.8,
                alpha=1.0 if is_centroid else 0.55,
                zorder=3 if is_centroid else 2,
            )
            ax_u.plot(points, fcs.means[i], **style)
            s = int(warps[i])
            sl = slice(max(0, -s), p - max(0, s))
            ax_a.plot(points[sl.start + s : sl.stop + s], fcs.means[i, sl], **style)
        ax_u.set_title(f"cluster {k + 1}: unaligned ({len(members)} entities)")
        ax_a.set_title("aligned to medoid")
        for ax in (ax_u, ax_a):
            ax.set_xlabel("time")
            ax.axhline(0, color="gray", lw=0.5)
        ax_u.set_ylabel("mean fold change")
        fig.tight_layout()
        out = directory / f"cluster_{k + 1:02d}.png"
        fig.savefig(out, dpi=150)
        plt.close(fig)
        written.append(out)
    return written


def render_sweep_figure(path, ks, total_costs, silhouettes) -> Path:
    """Total cost and silhouette score against the number of clusters."""
    plt = _plt()
    fig, ax_tc = plt.subplots(figsize=(6, 3.5))
    ax_tc.plot(ks, total_costs, "o-", color="tab:blue", label="total cost")
    ax_tc.set_xlabel("number of clusters")
    ax_tc.set_ylabel("total cost", color="tab:blue")
    ax_sil = ax_tc.twinx()
    ax_sil.plot(ks, silhouettes, "s--", color="tab:orange", label="silhouette")
    ax_sil.set_ylabel("silhouette score", color="tab:orange")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
