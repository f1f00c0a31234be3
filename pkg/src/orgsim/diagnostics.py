"""Read-only measurement surfaces over completed runs.

Everything here is a pure projection of a RunResult: efficiency curves,
promotion-shock statistics and histograms, per-path impact matrices,
negative-shock time series, cross-strategy comparison rows and per-agent
trajectories. Percentiles use the exact nearest-rank rule. A shock of
exactly zero counts as neither positive nor negative; negative shares use
strict < 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .domain import performance_at_levels
from .engine import PromotionLog, RunResult
from .strategies import nearest_rank_percentile

HISTOGRAM_LO = -0.5
HISTOGRAM_HI = 0.5
HISTOGRAM_BIN_WIDTH = 0.01
HISTOGRAM_BINS = int(round((HISTOGRAM_HI - HISTOGRAM_LO) / HISTOGRAM_BIN_WIDTH))

#: Shocks at or below this value count as "large" drops.
LARGE_DROP_THRESHOLD = -0.05


class UnknownAgentError(KeyError):
    pass


@dataclass
class DeltaSummary:
    """Exact summary statistics over promotion shocks.

    The histogram covers [-0.5, 0.5] in 0.01-wide bins with outliers clamped
    into the end bins, so its mass always equals ``count``.
    """

    count: int
    mean: float
    median: float
    share_negative: float
    share_large_negative: float
    min: float
    max: float
    p01: float
    p99: float
    histogram: np.ndarray

    @classmethod
    def empty(cls) -> "DeltaSummary":
        return cls(0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, np.zeros(HISTOGRAM_BINS, dtype=np.int64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DeltaSummary):
            return NotImplemented
        scalars = ("count", "mean", "median", "share_negative", "share_large_negative", "min", "max", "p01", "p99")
        return all(getattr(self, f) == getattr(other, f) for f in scalars) and np.array_equal(
            self.histogram, other.histogram
        )


def _deltas_of(events: Union[PromotionLog, np.ndarray, Sequence[float]]) -> np.ndarray:
    if isinstance(events, PromotionLog):
        return events.delta_p
    return np.asarray(events, dtype=np.float64)


def summarize_deltas(events: Union[PromotionLog, np.ndarray, Sequence[float]]) -> DeltaSummary:
    deltas = _deltas_of(events)
    n = int(deltas.size)
    if n == 0:
        return DeltaSummary.empty()
    bins = np.floor((deltas - HISTOGRAM_LO) / HISTOGRAM_BIN_WIDTH).astype(np.int64)
    np.clip(bins, 0, HISTOGRAM_BINS - 1, out=bins)
    return DeltaSummary(
        count=n,
        mean=float(deltas.sum() / n),
        median=nearest_rank_percentile(deltas, 0.50),
        share_negative=float((deltas < 0).sum() / n),
        share_large_negative=float((deltas <= LARGE_DROP_THRESHOLD).sum() / n),
        min=float(deltas.min()),
        max=float(deltas.max()),
        p01=nearest_rank_percentile(deltas, 0.01),
        p99=nearest_rank_percentile(deltas, 0.99),
        histogram=np.bincount(bins, minlength=HISTOGRAM_BINS),
    )


def histogram_edges() -> np.ndarray:
    return HISTOGRAM_LO + HISTOGRAM_BIN_WIDTH * np.arange(HISTOGRAM_BINS + 1)


@dataclass
class PathCell:
    count: int
    mean_delta: float
    positive: int
    negative: int


@dataclass
class PathMatrix:
    """Promotion impact grouped by (from_level, to_level).

    Skip-level cells (e.g. 1 -> 3) appear whenever the demotion-refill
    cascade produced multi-level moves.
    """

    cells: dict[tuple[int, int], PathCell] = field(default_factory=dict)

    def total_count(self) -> int:
        return sum(c.count for c in self.cells.values())

    def cell(self, from_level: int, to_level: int) -> Optional[PathCell]:
        return self.cells.get((from_level, to_level))


def path_matrix(events: PromotionLog) -> PathMatrix:
    matrix = PathMatrix()
    if len(events) == 0:
        return matrix
    pairs = events.from_level.astype(np.int64) * 10 + events.to_level.astype(np.int64)
    for key in np.unique(pairs):
        mask = pairs == key
        deltas = events.delta_p[mask]
        matrix.cells[(int(key) // 10, int(key) % 10)] = PathCell(
            count=int(mask.sum()),
            mean_delta=float(deltas.mean()),
            positive=int((deltas > 0).sum()),
            negative=int((deltas < 0).sum()),
        )
    return matrix


def negative_counts_series(events: PromotionLog, n_steps: int) -> np.ndarray:
    """Count of strictly negative shocks per step, steps 1..n_steps."""
    mask = events.delta_p < 0
    counts = np.bincount(events.step[mask], minlength=n_steps + 1)
    return counts[1 : n_steps + 1].astype(np.int64)


def efficiency_series(run: RunResult) -> np.ndarray:
    """The stored series E_0..E_T (mean performance across active agents)."""
    return run.efficiency


def recompute_efficiency(run: RunResult) -> np.ndarray:
    """Rebuild the efficiency series from histories; matches stored values
    within 1e-12 (in practice exactly, the kernel and mean are identical)."""
    weight_matrix = run.config.regime.weight_matrix()
    comp = run.base_competence.copy()
    updates = run.competence_updates
    order = np.argsort(updates.step, kind="stable")
    upd_step = updates.step[order]
    upd_ids = updates.agent_id[order]
    upd_values = updates.values[order]
    cursor = 0
    out = np.empty(run.n_steps + 1, dtype=np.float64)
    for t in range(run.n_steps + 1):
        while cursor < upd_step.size and upd_step[cursor] <= t:
            comp[upd_ids[cursor]] = upd_values[cursor]
            cursor += 1
        levels = run.level_history[t]
        mask = levels > 0
        perf = performance_at_levels(comp[mask], levels[mask].astype(np.int64), weight_matrix)
        out[t] = np.mean(perf)
    return out


@dataclass
class ComparisonRow:
    strategy: str
    mean_delta_p: float
    median_delta_p: float
    share_negative: float
    promotions: int
    final_efficiency: float


def strategy_comparison(runs: Sequence[RunResult]) -> list[ComparisonRow]:
    """One row per run; rejects runs that differ on N, T or regime.

    Promotion counts are reported so that rules promoting very different
    volumes are not compared blindly.
    """
    if not runs:
        return []
    head = runs[0].config
    for run in runs[1:]:
        cfg = run.config
        if (
            cfg.n_agents != head.n_agents
            or cfg.steps != head.steps
            or cfg.regime != head.regime
        ):
            raise ValueError(
                "comparison requires identical population, horizon and regime; "
                f"got {cfg.strategy.kind.value} run with different setup"
            )
    rows = []
    for run in runs:
        summary = summarize_deltas(run.effective_promotions)
        rows.append(
            ComparisonRow(
                strategy=run.config.strategy.kind.value,
                mean_delta_p=summary.mean,
                median_delta_p=summary.median,
                share_negative=summary.share_negative,
                promotions=summary.count,
                final_efficiency=float(run.efficiency[-1]),
            )
        )
    return rows


@dataclass
class TrajectoryPoint:
    step: int
    level: int
    performance: float


@dataclass
class AgentTrajectory:
    """Step-by-step record from join to exit (or the horizon).

    The exit step, when present, reports the agent's at-exit state.
    Competence snapshots list (step, skills) whenever training changed them;
    index 0 is the creation vector.
    """

    agent_id: int
    joined_at: int
    exited_at: Optional[int]
    points: list[TrajectoryPoint]
    competence_snapshots: list[tuple[int, tuple[float, float, float, float]]]


def agent_trajectory(run: RunResult, agent_id: int) -> AgentTrajectory:
    if not 0 <= agent_id < run.n_agents_total:
        raise UnknownAgentError(f"agent {agent_id} not present in this run")
    joined = int(run.joined_at[agent_id])
    exited_raw = int(run.exited_at[agent_id])
    exited = None if exited_raw < 0 else exited_raw
    last = run.n_steps if exited is None else exited

    updates = run.competence_updates
    mine = np.flatnonzero(updates.agent_id == agent_id)
    snapshots = [(joined, tuple(float(v) for v in run.base_competence[agent_id]))]
    for i in mine[np.argsort(updates.step[mine], kind="stable")]:
        snapshots.append((int(updates.step[i]), tuple(float(v) for v in updates.values[i])))

    weight_matrix = run.config.regime.weight_matrix()
    points = []
    cursor = 0
    comp = np.array(snapshots[0][1])
    for step in range(joined, last + 1):
        while cursor + 1 < len(snapshots) and snapshots[cursor + 1][0] <= step:
            cursor += 1
            comp = np.array(snapshots[cursor][1])
        level = int(run.level_history[step, agent_id])
        if level == 0:
            if step != exited:
                continue
            level = int(run.final_level[agent_id])
        perf = performance_at_levels(comp[None, :], np.array([level]), weight_matrix)[0]
        points.append(TrajectoryPoint(step=step, level=level, performance=float(perf)))
    return AgentTrajectory(
        agent_id=agent_id,
        joined_at=joined,
        exited_at=exited,
        points=points,
        competence_snapshots=snapshots,
    )
