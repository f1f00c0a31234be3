"""Policy hooks applied to just-promoted agents.

Selective demotion reverts any promotion whose immediate performance drop
reaches the tolerance, blacklists the agent for the rest of the run and
refills the abandoned seat by merit from the level below. Refills cascade
top-down within the same step and are not re-tested for demotion until the
next step. The training burst instead lifts the promoted agent's tech and
mgmt skills by one logistic-derivative increment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .state import Organization
from .strategies import PromotionCause, PromotionEvent, TrainingMode

#: Skill columns eligible for training (tech, mgmt); comp and soft are fixed.
TRAINABLE_COLUMNS = (0, 1)


@dataclass
class DemotionEvent:
    """One reverted promotion; drop is perf_pre - perf_post at the promotion."""

    agent_id: int
    step: int
    from_level: int
    to_level: int
    drop: float


def selective_demotion_pass(
    org: Organization,
    events: list[PromotionEvent],
    tolerance: float,
    timestep: int,
) -> tuple[list[DemotionEvent], dict[int, int]]:
    """Revert this step's promotions whose delta_p <= -tolerance.

    Runs once per step, immediately after the promotion pass and before the
    refill. Demoted agents return to their prior level (performance
    recomputed there), join the run-wide blacklist and leave a vacancy at the
    abandoned level; their promotion event stays in the log, flagged
    reversed. Events are processed in promotion order.
    """
    demotions: list[DemotionEvent] = []
    vacancies: dict[int, int] = {}
    for event in events:
        if event.delta_p > -tolerance:
            continue
        aid = event.agent_id
        org.move_level(np.array([aid]), event.from_level)
        org.just_promoted[aid] = False
        org.blacklisted[aid] = True
        event.reversed = True
        vacancies[event.to_level] = vacancies.get(event.to_level, 0) + 1
        demotions.append(
            DemotionEvent(
                agent_id=aid,
                step=timestep,
                from_level=event.to_level,
                to_level=event.from_level,
                drop=-event.delta_p,
            )
        )
    return demotions, vacancies


def refill_vacancies(
    org: Organization,
    vacancies: dict[int, int],
    timestep: int,
    step_events: list[PromotionEvent],
) -> list[PromotionEvent]:
    """Refill demotion vacancies by current performance, cascading top-down.

    Open seats are measured against capacity as each level is processed
    (highest first), so a refill that drains the level below opens seats
    there that the same pass then fills; a level that just absorbed a
    demotee never gets pushed over capacity. Blacklisted agents are excluded
    from every pool. Refilled promotions keep just_promoted set but are NOT
    re-tested for demotion this step.

    An agent promoted earlier this step that is re-selected here has its
    existing event updated in place (prev-level to end-of-step level); logs
    never show the intermediate hop. Newly created events are appended to
    ``step_events`` and also returned.
    """
    if not vacancies:
        return []
    by_agent = {e.agent_id: e for e in step_events if not e.reversed}
    created: list[PromotionEvent] = []
    top = max(vacancies)
    for level in range(top, 1, -1):
        counts = org.level_counts()
        open_seats = int(org.caps[level] - counts[level])
        if open_seats <= 0:
            continue
        pool = org.ids_at_level(level - 1)
        pool = pool[~org.blacklisted[pool]]
        if pool.size == 0:
            continue
        order = np.argsort(-org.performance[pool], kind="stable")
        chosen = pool[order[: min(open_seats, pool.size)]]
        perf_pre = org.performance[chosen].copy()
        org.move_level(chosen, level)
        org.just_promoted[chosen] = True
        perf_post = org.performance[chosen]
        for aid, pre, post in zip(chosen.tolist(), perf_pre.tolist(), perf_post.tolist()):
            existing = by_agent.get(aid)
            if existing is not None:
                existing.to_level = level
                existing.perf_post = post
                existing.delta_p = post - existing.perf_pre
                existing.cause = PromotionCause.DEMOTION_REFILL
                continue
            event = PromotionEvent(
                agent_id=aid,
                step=timestep,
                from_level=level - 1,
                to_level=level,
                perf_pre=pre,
                perf_post=post,
                delta_p=post - pre,
                cause=PromotionCause.DEMOTION_REFILL,
            )
            by_agent[aid] = event
            step_events.append(event)
            created.append(event)
    return created


def training_burst(
    competence: np.ndarray,
    mode: TrainingMode = TrainingMode.DYNAMIC,
    stored_rate: np.ndarray | None = None,
    gain: float = 1.0,
) -> np.ndarray:
    """One post-promotion training update on the trainable skills.

    Dynamic mode applies C <- min(1, C + gain*C*(1-C)) to tech and mgmt; the
    increment peaks at 0.25*gain at C = 0.5 and vanishes at both extremes.
    fixed_at_init instead adds the increment frozen from the agent's initial
    skills (stored_rate gives those initial tech/mgmt values). comp and soft
    are returned untouched, bit for bit.
    """
    out = np.array(competence, dtype=np.float64)
    current = out[list(TRAINABLE_COLUMNS)]
    if mode is TrainingMode.DYNAMIC:
        rate = gain * current * (1.0 - current)
    else:
        if stored_rate is None:
            raise ValueError("fixed_at_init training needs the agent's initial skills")
        base = np.asarray(stored_rate, dtype=np.float64)
        rate = gain * base * (1.0 - base)
    out[list(TRAINABLE_COLUMNS)] = np.minimum(1.0, current + rate)
    return out


def apply_training(
    org: Organization,
    events: list[PromotionEvent],
    mode: TrainingMode,
    gain: float = 1.0,
) -> list[tuple[int, np.ndarray]]:
    """Train every just-promoted agent and fold the effect into its event.

    perf_post and delta_p are re-recorded after the burst, so a promotion's
    logged shock includes the same-tick training. Returns (agent_id, new
    competence row) pairs for history bookkeeping; clears just_promoted.
    """
    if not events:
        return []
    cols = np.array(TRAINABLE_COLUMNS)
    ids = np.array([e.agent_id for e in events], dtype=np.int64)
    current = org.competence[ids][:, cols]
    if mode is TrainingMode.DYNAMIC:
        rate = gain * current * (1.0 - current)
    else:
        base = org.base_competence[ids][:, cols]
        rate = gain * base * (1.0 - base)
    org.competence[ids[:, None], cols[None, :]] = np.minimum(1.0, current + rate)
    org.recompute_performance(ids)
    org.just_promoted[ids] = False
    post = org.performance[ids]
    updates: list[tuple[int, np.ndarray]] = []
    for event, aid, p in zip(events, ids.tolist(), post.tolist()):
        event.perf_post = p
        event.delta_p = p - event.perf_pre
        updates.append((aid, org.competence[aid].copy()))
    return updates
