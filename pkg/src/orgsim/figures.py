"""Static matplotlib renderings of the run diagnostics.

The CLI report path drops these PNGs next to the delimited exports. All
numbers come straight from the diagnostics module; nothing is recomputed
here beyond plotting.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .diagnostics import (
    histogram_edges,
    negative_counts_series,
    path_matrix,
    summarize_deltas,
)
from .engine import RunResult

RUN_FIGURES = (
    "efficiency.png",
    "delta_histogram.png",
    "path_matrix.png",
    "negative_counts.png",
)


def render_run_figures(run: RunResult, directory: Union[str, Path]) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    label = run.config.strategy.kind.value
    paths = []

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(np.arange(run.efficiency.size), run.efficiency, lw=1.8)
    ax.set_xlabel("step")
    ax.set_ylabel("mean performance")
    ax.set_title(f"Efficiency over time ({label})")
    ax.grid(alpha=0.3)
    paths.append(_save(fig, directory / "efficiency.png"))

    summary = summarize_deltas(run.effective_promotions)
    edges = histogram_edges()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(edges[:-1], summary.histogram, width=edges[1] - edges[0], align="edge")
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("promotion shock (post - pre)")
    ax.set_ylabel("promotions")
    ax.set_title(f"Promotion shock distribution ({label}, n={summary.count})")
    paths.append(_save(fig, directory / "delta_histogram.png"))

    matrix = path_matrix(run.effective_promotions)
    grid = np.full((5, 5), np.nan)
    for (src, dst), cell in matrix.cells.items():
        grid[src - 1, dst - 1] = cell.mean_delta
    fig, ax = plt.subplots(figsize=(6, 5))
    shown = ax.imshow(grid, cmap="RdBu", vmin=-0.2, vmax=0.2)
    for (src, dst), cell in matrix.cells.items():
        ax.text(dst - 1, src - 1, f"{cell.mean_delta:+.3f}", ha="center", va="center", fontsize=8)
    ax.set_xticks(range(5), [f"L{i}" for i in range(1, 6)])
    ax.set_yticks(range(5), [f"L{i}" for i in range(1, 6)])
    ax.set_xlabel("to level")
    ax.set_ylabel("from level")
    ax.set_title(f"Mean promotion shock by path ({label})")
    fig.colorbar(shown, ax=ax, shrink=0.8)
    paths.append(_save(fig, directory / "path_matrix.png"))

    negatives = negative_counts_series(run.effective_promotions, run.n_steps)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(np.arange(1, run.n_steps + 1), negatives, width=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("promotions with a drop")
    ax.set_title(f"Negative promotion shocks per step ({label})")
    paths.append(_save(fig, directory / "negative_counts.png"))
    return paths


def render_comparison_figure(
    runs: Sequence[RunResult], directory: Union[str, Path]
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(9, 5))
    for run in runs:
        ax.plot(
            np.arange(run.efficiency.size),
            run.efficiency,
            lw=1.6,
            label=run.config.strategy.kind.value,
        )
    ax.set_xlabel("step")
    ax.set_ylabel("mean performance")
    ax.set_title("Efficiency by promotion strategy")
    ax.grid(alpha=0.3)
    ax.legend()
    return _save(fig, directory / "efficiency_comparison.png")


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
