"""Standalone SVG result plots; no display server required."""

from __future__ import annotations

import statistics
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_ALG_ORDER = ("bsb-half", "bsb-max", "permutations")


def _deterministic_svg(fig, path, salt: str) -> None:
    # Pin the id hash salt and drop the date so identical data gives identical bytes.
    with plt.rc_context({"svg.hashsalt": salt}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def ratio_boxplot(rows: list[dict], path, salt: str = "peerselect") -> None:
    """Cost-ratio distributions per dataset, one box per algorithm.

    ``rows`` are result records with ``dataset``, ``algorithm`` and
    ``ratio_vs_chord`` fields; chord (ratio 1.0 by construction) is skipped.
    """
    by_group: dict[tuple[str, str], list[float]] = defaultdict(list)
    for r in rows:
        if r["algorithm"] == "chord" or r["ratio_vs_chord"] is None:
            continue
        by_group[(r["dataset"], r["algorithm"])].append(r["ratio_vs_chord"])
    datasets = sorted({d for d, _ in by_group})
    algorithms = [a for a in _ALG_ORDER if any((d, a) in by_group for d in datasets)]
    if not datasets or not algorithms:
        raise ValueError("no ratio rows to plot")

    fig, ax = plt.subplots(figsize=(1.6 + 1.4 * len(datasets), 4.0))
    width = 0.8 / len(algorithms)
    colors = plt.get_cmap("tab10").colors
    for ai, alg in enumerate(algorithms):
        positions, data = [], []
        for di, ds in enumerate(datasets):
            vals = by_group.get((ds, alg))
            if vals:
                positions.append(di + (ai - (len(algorithms) - 1) / 2) * width)
                data.append(vals)
        box = ax.boxplot(data, positions=positions, widths=width * 0.9, patch_artist=True)
        for patch in box["boxes"]:
            patch.set_facecolor(colors[ai % len(colors)])
        for med, vals in zip(box["medians"], data):
            med.set_color("black")
            x = med.get_xdata().mean()
            ax.annotate(
                f"{statistics.median(vals):.2f}",
                (x, max(vals)),
                ha="center",
                va="bottom",
                fontsize=7,
            )
        ax.plot([], [], color=colors[ai % len(colors)], label=alg)
    ax.axhline(1.0, color="gray", linestyle=":", linewidth=1)
    ax.set_xticks(range(len(datasets)))
    ax.set_xticklabels(datasets, rotation=15, ha="right")
    ax.set_ylabel("cost ratio vs chord")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _deterministic_svg(fig, path, salt)


def chunk_lineplot(rows: list[dict], path, salt: str = "peerselect") -> None:
    """Mean cost ratio per time chunk, one line per algorithm."""
    by_alg: dict[str, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r["algorithm"] == "chord" or r["ratio_vs_chord"] is None:
            continue
        by_alg[r["algorithm"]][int(r["chunk"])].append(r["ratio_vs_chord"])
    if not by_alg:
        raise ValueError("no ratio rows to plot")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for alg in (a for a in _ALG_ORDER if a in by_alg):
        chunks = sorted(by_alg[alg])
        means = [sum(by_alg[alg][c]) / len(by_alg[alg][c]) for c in chunks]
        ax.plot(chunks, means, marker="o", label=alg)
        for c, v in zip(chunks, means):
            ax.annotate(f"{v:.2f}", (c, v), textcoords="offset points", xytext=(0, 5), fontsize=7)
    ax.axhline(1.0, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("time chunk")
    ax.set_ylabel("mean cost ratio vs chord")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _deterministic_svg(fig, path, salt)
