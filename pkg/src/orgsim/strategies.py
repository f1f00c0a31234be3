"""Candidate orderings for the promotion rules and the vacancy-filling pass.

All gated rules share one shape: partition candidates into Above/Below a
threshold, sort each bucket descending by the rule's key, and concatenate
Above-then-Below. The gate is soft: Below candidates still advance when
seats remain. Ties everywhere preserve candidate-list order (stable sort),
which for pools built from the state arrays means creation order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .domain import Agent
from .state import Organization


class StrategyKind(str, Enum):
    MERIT = "merit"
    SENIORITY = "seniority"
    HYBRID = "hybrid"
    RANDOM = "random"
    SELECTIVE_DEMOTION = "selective_demotion"
    MERIT_TRAINING = "merit_training"


#: Strategies whose candidate ordering is the merit ordering.
MERIT_ORDERED = frozenset(
    {StrategyKind.MERIT, StrategyKind.SELECTIVE_DEMOTION, StrategyKind.MERIT_TRAINING}
)


class TenureNorm(str, Enum):
    FIXED_CAP = "fixed_cap"
    ADAPTIVE_MAX = "adaptive_max"
    QUANTILE_95 = "quantile_95"


class TrainingMode(str, Enum):
    DYNAMIC = "dynamic"
    FIXED_AT_INIT = "fixed_at_init"


class PromotionCause(str, Enum):
    VACANCY_FILL = "vacancy_fill"
    DEMOTION_REFILL = "demotion_refill"


@dataclass(frozen=True)
class StrategyConfig:
    """Knobs for one promotion rule.

    ``tenure_cap`` of None resolves to the largest upper bound of the
    scenario's tenure bands (12 with defaults).
    """

    kind: StrategyKind = StrategyKind.MERIT
    performance_gate: float = 0.8
    tenure_gate: int = 5
    performance_weight: float = 0.7
    score_gate: float = 0.5
    tenure_norm: TenureNorm = TenureNorm.FIXED_CAP
    tenure_cap: Optional[float] = None
    demotion_tolerance: float = 0.05
    training_mode: TrainingMode = TrainingMode.DYNAMIC
    training_gain: float = 1.0

    def resolved(self, bands_max: int) -> "StrategyConfig":
        if self.tenure_cap is not None:
            return self
        return replace(self, tenure_cap=float(bands_max))


@dataclass
class PromotionEvent:
    """One promotion: pre/post performance measured around the level change.

    Under merit_training, perf_post and delta_p include the same-tick
    training burst; under selective demotion, a same-step cascade collapses
    into a single event from the pre-step level to the end-of-step level.
    A promotion undone by same-step demotion stays in the log flagged
    ``reversed``; reporting surfaces use the effective (non-reversed) view,
    matching logs that record only prev-level to end-of-step level.
    """

    agent_id: int
    step: int
    from_level: int
    to_level: int
    perf_pre: float
    perf_post: float
    delta_p: float
    cause: PromotionCause
    reversed: bool = False


def gated_descending(values: np.ndarray, gate: float) -> np.ndarray:
    """Positions ordered Above-gate first, each bucket descending, stable ties."""
    values = np.asarray(values)
    positions = np.arange(values.size)
    above = values >= gate
    above_pos = positions[above]
    below_pos = positions[~above]
    above_sorted = above_pos[np.argsort(-values[above], kind="stable")]
    below_sorted = below_pos[np.argsort(-values[~above], kind="stable")]
    return np.concatenate([above_sorted, below_sorted])


def order_merit(candidates: Sequence[Agent], performance_gate: float = 0.8) -> list[Agent]:
    """Soft performance gate: Above (P >= gate) descending, then Below descending."""
    perf = np.array([a.performance for a in candidates], dtype=np.float64)
    return [candidates[i] for i in gated_descending(perf, performance_gate)]


def order_seniority(candidates: Sequence[Agent], tenure_gate: int = 5) -> list[Agent]:
    """Soft tenure gate; same shape as the merit ordering with years as the key."""
    years = np.array([a.tenure_years for a in candidates], dtype=np.int64)
    return [candidates[i] for i in gated_descending(years, tenure_gate)]


def normalize_tenure(
    years: float,
    mode: TenureNorm,
    pool: Optional[Sequence[float]] = None,
    cap: float = 12.0,
) -> float:
    """Map tenure years to [0, 1] under the configured cap rule.

    fixed_cap divides by a constant; adaptive_max self-normalizes against the
    pool's maximum each step; quantile_95 caps at the pool's nearest-rank
    95th percentile. A zero cap value (all-zero-tenure pool) normalizes to 0.
    """
    if years < 0:
        raise ValueError("years must be non-negative")
    if mode is TenureNorm.FIXED_CAP:
        return min(years / cap, 1.0)
    if pool is None or len(pool) == 0:
        raise ValueError(f"{mode.value} normalization needs a non-empty pool")
    pool_arr = np.asarray(pool, dtype=np.float64)
    if mode is TenureNorm.ADAPTIVE_MAX:
        top = float(pool_arr.max())
        return 0.0 if top == 0.0 else years / top
    if mode is TenureNorm.QUANTILE_95:
        q = nearest_rank_percentile(pool_arr, 0.95)
        return 0.0 if q == 0.0 else min(years / q, 1.0)
    raise ValueError(f"unknown tenure normalization {mode!r}")


def nearest_rank_percentile(values: np.ndarray, q: float) -> float:
    """Exact nearest-rank percentile: the ceil(q*n)-th smallest value."""
    if values.size == 0:
        raise ValueError("percentile of empty data")
    ordered = np.sort(values)
    rank = max(1, int(np.ceil(q * ordered.size)))
    return float(ordered[rank - 1])


def hybrid_score(
    performance: float,
    years: float,
    performance_weight: float = 0.7,
    tenure_norm: TenureNorm = TenureNorm.FIXED_CAP,
    pool: Optional[Sequence[float]] = None,
    cap: float = 12.0,
) -> float:
    """Blend of performance and normalized tenure with weight on performance."""
    normed = normalize_tenure(years, tenure_norm, pool, cap)
    return performance_weight * performance + (1.0 - performance_weight) * normed


def _normalize_tenure_array(
    years: np.ndarray, mode: TenureNorm, pool: np.ndarray, cap: float
) -> np.ndarray:
    years = years.astype(np.float64)
    if mode is TenureNorm.FIXED_CAP:
        return np.minimum(years / cap, 1.0)
    if pool.size == 0:
        raise ValueError(f"{mode.value} normalization needs a non-empty pool")
    if mode is TenureNorm.ADAPTIVE_MAX:
        top = float(pool.max())
        return np.zeros_like(years) if top == 0.0 else years / top
    q = nearest_rank_percentile(pool.astype(np.float64), 0.95)
    return np.zeros_like(years) if q == 0.0 else np.minimum(years / q, 1.0)


def hybrid_scores(
    performance: np.ndarray, years: np.ndarray, config: StrategyConfig
) -> np.ndarray:
    cap = config.tenure_cap if config.tenure_cap is not None else 12.0
    normed = _normalize_tenure_array(
        np.asarray(years), config.tenure_norm, np.asarray(years, dtype=np.float64), cap
    )
    alpha = config.performance_weight
    return alpha * np.asarray(performance, dtype=np.float64) + (1.0 - alpha) * normed


def order_hybrid(
    candidates: Sequence[Agent],
    config: StrategyConfig,
    pool: Optional[Sequence[float]] = None,
) -> list[Agent]:
    """Soft score gate over the blended key; pool defaults to the candidates'
    own tenures (the per-level pool at this step)."""
    perf = np.array([a.performance for a in candidates], dtype=np.float64)
    years = np.array([a.tenure_years for a in candidates], dtype=np.float64)
    pool_arr = years if pool is None else np.asarray(pool, dtype=np.float64)
    cap = config.tenure_cap if config.tenure_cap is not None else 12.0
    normed = _normalize_tenure_array(years, config.tenure_norm, pool_arr, cap)
    scores = config.performance_weight * perf + (1.0 - config.performance_weight) * normed
    return [candidates[i] for i in gated_descending(scores, config.score_gate)]


def order_random(candidates: Sequence[Agent], rng: np.random.Generator) -> list[Agent]:
    """Uniform random permutation drawn from the run's ordering stream."""
    perm = rng.permutation(len(candidates))
    return [candidates[i] for i in perm]


def ordered_positions(
    org: Organization,
    pool: np.ndarray,
    strategy: StrategyConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Strategy ordering over a pool of agent ids; returns positions into it."""
    kind = strategy.kind
    if kind in MERIT_ORDERED:
        return gated_descending(org.performance[pool], strategy.performance_gate)
    if kind is StrategyKind.SENIORITY:
        return gated_descending(org.tenure[pool], strategy.tenure_gate)
    if kind is StrategyKind.HYBRID:
        scores = hybrid_scores(org.performance[pool], org.tenure[pool], strategy)
        return gated_descending(scores, strategy.score_gate)
    if kind is StrategyKind.RANDOM:
        return rng.permutation(pool.size)
    raise ValueError(f"unknown strategy kind {kind!r}")


def promote_step(
    org: Organization,
    strategy: StrategyConfig,
    timestep: int,
    ordering_rng: np.random.Generator,
) -> list[PromotionEvent]:
    """Fill vacancies top-down (4 -> 1), promoting the top of each ordering.

    Because the loop runs top-down, a chain of single vacancies propagates
    down within one step. When a pool is smaller than the open seats, every
    candidate advances and the remainder stays vacant until a later step.
    The random ordering draws from the stream only when a pool actually has
    vacancies to fill, keeping stream use minimal and documented.
    """
    events: list[PromotionEvent] = []
    for lvl in (4, 3, 2, 1):
        counts = org.level_counts()
        vacancies = int(org.caps[lvl + 1] - counts[lvl + 1])
        if vacancies <= 0:
            continue
        pool = org.ids_at_level(lvl)
        if strategy.kind is StrategyKind.SELECTIVE_DEMOTION:
            pool = pool[~org.blacklisted[pool]]
        if pool.size == 0:
            continue
        order = ordered_positions(org, pool, strategy, ordering_rng)
        chosen = pool[order[: min(vacancies, pool.size)]]
        perf_pre = org.performance[chosen].copy()
        org.move_level(chosen, lvl + 1)
        org.just_promoted[chosen] = True
        perf_post = org.performance[chosen]
        for aid, pre, post in zip(chosen.tolist(), perf_pre.tolist(), perf_post.tolist()):
            events.append(
                PromotionEvent(
                    agent_id=aid,
                    step=timestep,
                    from_level=lvl,
                    to_level=lvl + 1,
                    perf_pre=pre,
                    perf_post=post,
                    delta_p=post - pre,
                    cause=PromotionCause.VACANCY_FILL,
                )
            )
    return events
