"""Initial organization build: capacities, agents, level seeding, tenure.

Level seats are fixed shares of the population, made integral by flooring
levels 2..5 and letting Level 1 absorb the remainder. Levels are then filled
top-down (5, 4, 3, 2) by progressively relaxing per-skill qualification
thresholds derived from each level's demand shares; whoever is left lands at
Level 1. Scanning is strict creation order at every pass, which makes the
whole build deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .domain import N_LEVELS, Regime
from .state import Organization, RngStreams

if TYPE_CHECKING:  # pragma: no cover
    from .config import ScenarioConfig

#: Relaxation grid for the seeding predicate; thresholds scale by (1 - value).
DEFAULT_RELAXATION_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

#: Inclusive base-tenure intervals per level, Level 1 first.
DEFAULT_TENURE_RANGES = ((0, 3), (2, 5), (4, 7), (6, 10), (8, 12))

DEFAULT_LEVEL_SHARES = (0.40, 0.25, 0.20, 0.10, 0.05)


@dataclass(frozen=True)
class TenureBands:
    """Per-level inclusive intervals for initial tenure plus symmetric jitter."""

    ranges: tuple[tuple[int, int], ...] = DEFAULT_TENURE_RANGES
    jitter_half_width: int = 5

    def __post_init__(self) -> None:
        if len(self.ranges) != N_LEVELS:
            raise ValueError(f"tenure bands need {N_LEVELS} ranges")
        for lo, hi in self.ranges:
            if lo > hi:
                raise ValueError(f"tenure range ({lo}, {hi}) has lo > hi")
            if lo < 0:
                raise ValueError(f"tenure range ({lo}, {hi}) has negative bound")
        if self.jitter_half_width < 0:
            raise ValueError("jitter_half_width must be non-negative")


def compute_capacities(n_agents: int, shares: Sequence[float]) -> tuple[int, int, int, int, int]:
    """Integer seats per level via the floor-remainder rule.

    Levels 2..5 get floor(share * N); Level 1 takes whatever remains, which
    exceeds its own share by less than 4 seats.
    """
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    validate_shares(shares)
    upper = [int(np.floor(shares[lvl - 1] * n_agents)) for lvl in range(2, 6)]
    cap1 = n_agents - sum(upper)
    return (cap1, *upper)  # type: ignore[return-value]


def validate_shares(shares: Sequence[float]) -> None:
    if len(shares) != N_LEVELS:
        raise ValueError(f"level shares need {N_LEVELS} entries")
    if any(s < 0 for s in shares):
        raise ValueError("level shares must be non-negative")
    total = sum(shares)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"level shares sum to {total!r}, expected 1.0")


def create_agents(n_agents: int, rng: np.random.Generator) -> np.ndarray:
    """(n, 4) i.i.d. Uniform(0,1) skill draws; row order is creation order."""
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    return rng.random((n_agents, 4))


def qualifies(
    competence: np.ndarray, weights: np.ndarray, relaxation: float
) -> np.ndarray:
    """Seeding predicate: every demanded skill clears (1 - relaxation) * share.

    Zero-share skills impose no threshold ("not demanded"). Vectorized over
    rows of ``competence``.
    """
    demanded = weights > 0.0
    thresholds = (1.0 - relaxation) * weights[demanded]
    if not demanded.any():
        return np.ones(competence.shape[0], dtype=bool)
    return np.all(competence[:, demanded] >= thresholds, axis=1)


@dataclass
class LevelAssignment:
    """Seeding outcome plus introspection data.

    ``order`` lists agent ids in the order they were assigned (upper levels
    first, Level 1 residuals last, creation order within each pass);
    ``admitted_relaxation`` records the grid value that admitted each agent
    (NaN for Level 1 residuals, which face no predicate).
    """

    levels: np.ndarray
    order: np.ndarray
    admitted_relaxation: np.ndarray


def seed_levels(
    competence: np.ndarray,
    regime: Regime,
    caps: Sequence[int],
    relaxation_grid: Sequence[float] = DEFAULT_RELAXATION_GRID,
) -> LevelAssignment:
    """Top-down greedy level assignment with threshold relaxation.

    For each level 5..2 and each grid value in order, unassigned agents are
    scanned in creation order and assigned while seats remain. The final grid
    value of 1.0 makes the predicate vacuous, so seats always fill when
    enough agents remain.
    """
    n = competence.shape[0]
    if sum(caps) != n:
        raise ValueError(f"capacities sum to {sum(caps)}, expected {n}")
    levels = np.zeros(n, dtype=np.int16)
    admitted = np.full(n, np.nan)
    order_chunks: list[np.ndarray] = []

    for lvl in (5, 4, 3, 2):
        remaining = int(caps[lvl - 1])
        weights = regime.profile(lvl).as_array()
        for rho in relaxation_grid:
            if remaining == 0:
                break
            unassigned = levels == 0
            ok = qualifies(competence, weights, float(rho)) & unassigned
            picked = np.flatnonzero(ok)[:remaining]
            if picked.size:
                levels[picked] = lvl
                admitted[picked] = rho
                order_chunks.append(picked)
                remaining -= picked.size

    residual = np.flatnonzero(levels == 0)
    levels[residual] = 1
    order_chunks.append(residual)
    order = np.concatenate(order_chunks) if order_chunks else np.empty(0, dtype=np.int64)
    return LevelAssignment(levels=levels, order=order, admitted_relaxation=admitted)


def seed_tenure(level: int, bands: TenureBands, rng: np.random.Generator) -> int:
    """One agent's initial tenure: band draw plus jitter, clamped at zero.

    Both the band endpoints and the jitter endpoints are inclusive.
    """
    lo, hi = bands.ranges[level - 1]
    j = bands.jitter_half_width
    base = int(rng.integers(lo, hi + 1))
    jitter = int(rng.integers(-j, j + 1))
    return max(0, base + jitter)


def seed_tenure_all(
    levels: np.ndarray,
    order: np.ndarray,
    bands: TenureBands,
    rng: np.random.Generator,
) -> np.ndarray:
    """Initial tenure for every agent.

    Draws are vectorized in assignment order: all band draws first, then all
    jitters (part of the documented stream contract).
    """
    ranges = np.asarray(bands.ranges, dtype=np.int64)
    lvl_in_order = levels[order].astype(np.int64)
    lows = ranges[lvl_in_order - 1, 0]
    highs = ranges[lvl_in_order - 1, 1]
    j = bands.jitter_half_width
    bases = rng.integers(lows, highs + 1)
    jitters = rng.integers(-j, j + 1, size=order.size)
    tenure = np.zeros(levels.shape[0], dtype=np.int32)
    tenure[order] = np.maximum(0, bases + jitters)
    return tenure


def initialize_org(
    config: "ScenarioConfig", streams: RngStreams | None = None
) -> tuple[Organization, float, LevelAssignment]:
    """Full build pipeline; returns the org, its initial efficiency and the
    assignment record.

    Consumes only the skills and tenure streams, so dynamic phases started
    afterwards see identical stream states regardless of strategy.
    """
    if streams is None:
        streams = RngStreams.from_seed(config.seed)
    caps5 = compute_capacities(config.n_agents, config.level_shares)
    skills = create_agents(config.n_agents, streams.skills)
    assignment = seed_levels(skills, config.regime, caps5, config.relaxation_grid)
    tenure = seed_tenure_all(assignment.levels, assignment.order, config.tenure_bands, streams.tenure)
    caps = np.zeros(6, dtype=np.int64)
    caps[1:] = caps5
    org = Organization(config.regime, caps, skills, assignment.levels, tenure)
    return org, org.efficiency(), assignment
