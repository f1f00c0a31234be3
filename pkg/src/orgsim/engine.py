"""Per-step schedule, attrition, hiring and the run driver.

Each step executes, in order: tenure increments, a full performance
recompute (cache-consistency by construction), attrition, the promotion
pass, the strategy's policy hook (selective demotion + refill, or the
training burst; plain strategies just clear flags), and Level-1 hiring.
Efficiency is recorded after hiring so the series always averages exactly N
agents. Attrition is the only removal and Level-1 hiring the only addition;
a step-level check enforces both headcount and capacity conservation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .config import ScenarioConfig, config_to_dict, validate_config
from .domain import LEVELS
from .mitigations import DemotionEvent, apply_training, refill_vacancies, selective_demotion_pass
from .seeding import initialize_org
from .state import LEVEL_DTYPE, Organization, RngStreams
from .strategies import (
    PromotionCause,
    PromotionEvent,
    StrategyConfig,
    StrategyKind,
    promote_step,
)

CAUSE_CODES = (PromotionCause.VACANCY_FILL, PromotionCause.DEMOTION_REFILL)


@dataclass
class PromotionLog:
    """Column-oriented promotion event log.

    ``reversed`` marks promotions undone by same-step demotion; they remain
    here so every demotion has its matching inverse, while ``effective()``
    yields the net view that all reporting is computed over.
    """

    agent_id: np.ndarray
    step: np.ndarray
    from_level: np.ndarray
    to_level: np.ndarray
    perf_pre: np.ndarray
    perf_post: np.ndarray
    delta_p: np.ndarray
    cause: np.ndarray
    reversed: np.ndarray

    @classmethod
    def from_events(cls, events: Sequence[PromotionEvent]) -> "PromotionLog":
        n = len(events)
        return cls(
            agent_id=np.array([e.agent_id for e in events], dtype=np.int64).reshape(n),
            step=np.array([e.step for e in events], dtype=np.int32).reshape(n),
            from_level=np.array([e.from_level for e in events], dtype=np.int8).reshape(n),
            to_level=np.array([e.to_level for e in events], dtype=np.int8).reshape(n),
            perf_pre=np.array([e.perf_pre for e in events], dtype=np.float64).reshape(n),
            perf_post=np.array([e.perf_post for e in events], dtype=np.float64).reshape(n),
            delta_p=np.array([e.delta_p for e in events], dtype=np.float64).reshape(n),
            cause=np.array(
                [CAUSE_CODES.index(e.cause) for e in events], dtype=np.uint8
            ).reshape(n),
            reversed=np.array([e.reversed for e in events], dtype=bool).reshape(n),
        )

    def __len__(self) -> int:
        return int(self.agent_id.size)

    def effective(self) -> "PromotionLog":
        """Promotions that stood at end of step (reversed ones dropped)."""
        if not self.reversed.any():
            return self
        keep = ~self.reversed
        return PromotionLog(
            agent_id=self.agent_id[keep],
            step=self.step[keep],
            from_level=self.from_level[keep],
            to_level=self.to_level[keep],
            perf_pre=self.perf_pre[keep],
            perf_post=self.perf_post[keep],
            delta_p=self.delta_p[keep],
            cause=self.cause[keep],
            reversed=self.reversed[keep],
        )

    def event(self, i: int) -> PromotionEvent:
        return PromotionEvent(
            agent_id=int(self.agent_id[i]),
            step=int(self.step[i]),
            from_level=int(self.from_level[i]),
            to_level=int(self.to_level[i]),
            perf_pre=float(self.perf_pre[i]),
            perf_post=float(self.perf_post[i]),
            delta_p=float(self.delta_p[i]),
            cause=CAUSE_CODES[int(self.cause[i])],
            reversed=bool(self.reversed[i]),
        )

    def __iter__(self):
        return (self.event(i) for i in range(len(self)))


@dataclass
class DemotionLog:
    agent_id: np.ndarray
    step: np.ndarray
    from_level: np.ndarray
    to_level: np.ndarray
    drop: np.ndarray

    @classmethod
    def from_events(cls, events: Sequence[DemotionEvent]) -> "DemotionLog":
        return cls(
            agent_id=np.array([e.agent_id for e in events], dtype=np.int64),
            step=np.array([e.step for e in events], dtype=np.int32),
            from_level=np.array([e.from_level for e in events], dtype=np.int8),
            to_level=np.array([e.to_level for e in events], dtype=np.int8),
            drop=np.array([e.drop for e in events], dtype=np.float64),
        )

    def __len__(self) -> int:
        return int(self.agent_id.size)

    def event(self, i: int) -> DemotionEvent:
        return DemotionEvent(
            agent_id=int(self.agent_id[i]),
            step=int(self.step[i]),
            from_level=int(self.from_level[i]),
            to_level=int(self.to_level[i]),
            drop=float(self.drop[i]),
        )

    def __iter__(self):
        return (self.event(i) for i in range(len(self)))


@dataclass
class AttritionLog:
    """One row per exit: (step, level, agent_id), ids ascending within level."""

    step: np.ndarray
    level: np.ndarray
    agent_id: np.ndarray

    def __len__(self) -> int:
        return int(self.agent_id.size)


@dataclass
class HireLog:
    step: np.ndarray
    agent_id: np.ndarray

    def __len__(self) -> int:
        return int(self.agent_id.size)


@dataclass
class CompetenceUpdates:
    """Post-training competence snapshots: (step, agent_id, new row)."""

    step: np.ndarray
    agent_id: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.agent_id.size)


@dataclass(frozen=True)
class RunMeta:
    seed: int
    version: str
    wall_time_s: float
    n_agents_total: int


_ARRAY_FIELDS = (
    "efficiency",
    "level_history",
    "base_competence",
    "joined_at",
    "exited_at",
    "final_level",
    "final_tenure",
    "final_performance",
    "blacklisted",
)


@dataclass
class RunResult:
    """Complete, replayable record of one simulation.

    ``level_history[t, aid]`` is the agent's level at the step-t boundary, 0
    before joining and after exit. Competence snapshots are stored only when
    training changes them; per-step performance is recomputed on demand from
    (competence, level, regime), which reproduces the cached values exactly.
    """

    config: ScenarioConfig
    efficiency: np.ndarray
    promotions: PromotionLog
    demotions: DemotionLog
    attrition: AttritionLog
    hires: HireLog
    level_history: np.ndarray
    base_competence: np.ndarray
    competence_updates: CompetenceUpdates
    joined_at: np.ndarray
    exited_at: np.ndarray
    final_level: np.ndarray
    final_tenure: np.ndarray
    final_performance: np.ndarray
    blacklisted: np.ndarray
    meta: RunMeta

    @property
    def n_steps(self) -> int:
        return int(self.efficiency.size - 1)

    @property
    def n_agents_total(self) -> int:
        return int(self.base_competence.shape[0])

    @property
    def effective_promotions(self) -> PromotionLog:
        """Net promotion log: what the diagnostics and exports report over."""
        return self.promotions.effective()

    def active_at(self, step: int) -> np.ndarray:
        return self.level_history[step] > 0

    def competence_at(self, step: int) -> np.ndarray:
        """Skill matrix as of the step boundary (training applied through it)."""
        comp = self.base_competence.copy()
        mask = self.competence_updates.step <= step
        if mask.any():
            order = np.argsort(self.competence_updates.step[mask], kind="stable")
            ids = self.competence_updates.agent_id[mask][order]
            values = self.competence_updates.values[mask][order]
            comp[ids] = values
        return comp

    def __eq__(self, other: object) -> bool:
        """Field-by-field equality; wall time is volatile and excluded, so a
        reloaded run compares equal to a fresh run of the same config."""
        if not isinstance(other, RunResult):
            return NotImplemented
        if self.config != other.config:
            return False
        mine, theirs = self.meta, other.meta
        if (mine.seed, mine.version, mine.n_agents_total) != (
            theirs.seed,
            theirs.version,
            theirs.n_agents_total,
        ):
            return False
        for name in _ARRAY_FIELDS:
            if not np.array_equal(getattr(self, name), getattr(other, name)):
                return False
        for log_name in ("promotions", "demotions", "attrition", "hires", "competence_updates"):
            a, b = getattr(self, log_name), getattr(other, log_name)
            for col in vars(a):
                if not np.array_equal(getattr(a, col), getattr(b, col)):
                    return False
        return True


class ConservationError(RuntimeError):
    """Raised when a step violates headcount or capacity conservation."""


def apply_attrition(
    org: Organization,
    rates: Sequence[float],
    rng: np.random.Generator,
    timestep: int,
) -> dict[int, np.ndarray]:
    """Remove floor(rate * headcount) agents per level, uniformly without
    replacement; levels processed ascending. Returns exited ids per level."""
    removed: dict[int, np.ndarray] = {}
    for lvl in LEVELS:
        ids = org.ids_at_level(lvl)
        count = int(np.floor(rates[lvl - 1] * ids.size))
        if count <= 0:
            removed[lvl] = np.empty(0, dtype=np.int64)
            continue
        exits = np.sort(rng.choice(ids, size=count, replace=False))
        org.exit_agents(exits, timestep)
        removed[lvl] = exits
    return removed


def hire_level1(org: Organization, rng: np.random.Generator, timestep: int) -> np.ndarray:
    """Refill Level 1 to capacity with fresh uniform-skill entrants, tenure 0."""
    deficit = int(org.caps[1] - org.level_counts()[1])
    if deficit <= 0:
        return np.empty(0, dtype=np.int64)
    skills = rng.random((deficit, 4))
    return org.add_hires(skills, 1, timestep)


@dataclass
class _LogBuilder:
    promotions: list[PromotionEvent] = field(default_factory=list)
    demotions: list[DemotionEvent] = field(default_factory=list)
    attrition_rows: list[tuple[int, int, np.ndarray]] = field(default_factory=list)
    hire_rows: list[tuple[int, np.ndarray]] = field(default_factory=list)
    update_rows: list[tuple[int, int, np.ndarray]] = field(default_factory=list)
    level_rows: list[np.ndarray] = field(default_factory=list)

    def snapshot_levels(self, org: Organization) -> None:
        self.level_rows.append(
            np.where(org.active, org.level, 0).astype(LEVEL_DTYPE)
        )


def run_step(
    org: Organization,
    strategy: StrategyConfig,
    rates: Sequence[float],
    streams: RngStreams,
    timestep: int,
    logs: _LogBuilder,
) -> float:
    """Advance one step and return its efficiency."""
    org.timestep = timestep
    org.tenure[org.active] += 1
    org.recompute_performance()

    exited = apply_attrition(org, rates, streams.attrition, timestep)
    for lvl in LEVELS:
        if exited[lvl].size:
            logs.attrition_rows.append((timestep, lvl, exited[lvl]))

    events = promote_step(org, strategy, timestep, streams.ordering)

    if strategy.kind is StrategyKind.SELECTIVE_DEMOTION:
        demotions, vacancies = selective_demotion_pass(
            org, events, strategy.demotion_tolerance, timestep
        )
        refill_vacancies(org, vacancies, timestep, events)
        logs.demotions.extend(demotions)
    elif strategy.kind is StrategyKind.MERIT_TRAINING:
        for aid, row in apply_training(org, events, strategy.training_mode, strategy.training_gain):
            logs.update_rows.append((timestep, aid, row))
    org.just_promoted[:] = False

    hired = hire_level1(org, streams.hiring, timestep)
    if hired.size:
        logs.hire_rows.append((timestep, hired))

    logs.promotions.extend(events)
    logs.snapshot_levels(org)
    _check_conservation(org)
    return org.efficiency()


def _check_conservation(org: Organization) -> None:
    counts = org.level_counts()
    expected = int(org.caps.sum())
    if org.active_count() != expected:
        raise ConservationError(
            f"population {org.active_count()} != {expected} at step {org.timestep}"
        )
    over = np.flatnonzero(counts[1:] > org.caps[1:])
    if over.size:
        lvl = int(over[0]) + 1
        raise ConservationError(
            f"level {lvl} holds {counts[lvl]} agents, cap {org.caps[lvl]}, step {org.timestep}"
        )


def run_simulation(config: ScenarioConfig) -> RunResult:
    """Initialize and drive a full run; (config, seed) fully determine the result."""
    validate_config(config)
    started = time.perf_counter()
    streams = RngStreams.from_seed(config.seed)
    org, e0, _ = initialize_org(config, streams)
    return _drive(org, config, streams, e0, started)


def run_strategies(
    config: ScenarioConfig, kinds: Iterable[StrategyKind | str]
) -> list[RunResult]:
    """One run per strategy from a single initialized org (cloned per run).

    Every run re-derives fresh dynamic streams from the seed, so each result
    is identical to a standalone run_simulation with that strategy, and all
    runs share the initial efficiency exactly.
    """
    validate_config(config)
    base_streams = RngStreams.from_seed(config.seed)
    base_org, e0, _ = initialize_org(config, base_streams)
    results = []
    for kind in kinds:
        kind = StrategyKind(kind)
        started = time.perf_counter()
        cfg = config.with_overrides(kind=kind)
        results.append(
            _drive(base_org.clone(), cfg, RngStreams.from_seed(config.seed), e0, started)
        )
    return results


def _drive(
    org: Organization,
    config: ScenarioConfig,
    streams: RngStreams,
    e0: float,
    started: float,
) -> RunResult:
    strategy = config.resolved_strategy()
    rates = config.attrition_rates
    logs = _LogBuilder()
    logs.snapshot_levels(org)
    efficiency = [e0]
    for t in range(1, config.steps + 1):
        efficiency.append(run_step(org, strategy, rates, streams, t, logs))
    return _assemble(org, config, efficiency, logs, started)


def _assemble(
    org: Organization,
    config: ScenarioConfig,
    efficiency: list[float],
    logs: _LogBuilder,
    started: float,
) -> RunResult:
    n_total = org.n_total
    history = np.zeros((len(logs.level_rows), n_total), dtype=LEVEL_DTYPE)
    for t, row in enumerate(logs.level_rows):
        history[t, : row.size] = row

    att_step = np.array(
        [t for t, _, ids in logs.attrition_rows for _ in range(ids.size)], dtype=np.int32
    )
    att_level = np.array(
        [lvl for _, lvl, ids in logs.attrition_rows for _ in range(ids.size)], dtype=np.int8
    )
    att_ids = (
        np.concatenate([ids for _, _, ids in logs.attrition_rows])
        if logs.attrition_rows
        else np.empty(0, dtype=np.int64)
    )

    hire_step = np.array(
        [t for t, ids in logs.hire_rows for _ in range(ids.size)], dtype=np.int32
    )
    hire_ids = (
        np.concatenate([ids for _, ids in logs.hire_rows])
        if logs.hire_rows
        else np.empty(0, dtype=np.int64)
    )

    updates = CompetenceUpdates(
        step=np.array([t for t, _, _ in logs.update_rows], dtype=np.int32),
        agent_id=np.array([aid for _, aid, _ in logs.update_rows], dtype=np.int64),
        values=(
            np.vstack([row for _, _, row in logs.update_rows])
            if logs.update_rows
            else np.empty((0, 4), dtype=np.float64)
        ),
    )

    meta = RunMeta(
        seed=config.seed,
        version=__version__,
        wall_time_s=time.perf_counter() - started,
        n_agents_total=n_total,
    )
    return RunResult(
        config=config,
        efficiency=np.array(efficiency, dtype=np.float64),
        promotions=PromotionLog.from_events(logs.promotions),
        demotions=DemotionLog.from_events(logs.demotions),
        attrition=AttritionLog(att_step, att_level, att_ids),
        hires=HireLog(hire_step, hire_ids),
        level_history=history,
        base_competence=org.base_competence.copy(),
        competence_updates=updates,
        joined_at=org.joined_at.copy(),
        exited_at=org.exited_at.copy(),
        final_level=org.level.copy(),
        final_tenure=org.tenure.copy(),
        final_performance=org.performance.copy(),
        blacklisted=org.blacklisted.copy(),
        meta=meta,
    )
