"""Core value types and the performance kernel shared by the whole simulator.

An agent carries four static skills (tech, mgmt, comp, soft), each in [0, 1].
Every organizational level demands those skills in fixed shares that sum to
one; performance in a role is the clipped dot product of the agent's skill
vector with the level's demand shares. A zero share means the skill is not
demanded at that level: it contributes nothing to performance and imposes no
threshold during initial seeding.

The dot product is evaluated in a pinned term order (tech, mgmt, comp, soft,
summed left to right) in both the scalar and vectorized paths so that
independent reimplementations of the arithmetic reproduce results bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

SKILLS = ("tech", "mgmt", "comp", "soft")
N_SKILLS = len(SKILLS)
LEVELS = (1, 2, 3, 4, 5)
N_LEVELS = len(LEVELS)

# Weight rows must sum to 1 within this tolerance.
WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class CompetenceVector:
    """Four static skill levels, each in the unit interval."""

    tech: float
    mgmt: float
    comp: float
    soft: float

    def __post_init__(self) -> None:
        for name, value in zip(SKILLS, self.as_tuple()):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"competence component {name}={value!r} outside [0, 1]")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.tech, self.mgmt, self.comp, self.soft)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "CompetenceVector":
        tech, mgmt, comp, soft = (float(v) for v in values)
        return cls(tech, mgmt, comp, soft)


@dataclass(frozen=True)
class RoleProfile:
    """Demand shares over the four skills for one level.

    Shares are non-negative and sum to one; a zero share marks the skill as
    not demanded at this level.
    """

    weights: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.weights) != N_SKILLS:
            raise ValueError(f"role profile needs {N_SKILLS} weights, got {len(self.weights)}")
        for name, w in zip(SKILLS, self.weights):
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {name}={w!r} outside [0, 1]")
        total = sum(self.weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1.0")

    def demanded(self) -> tuple[bool, bool, bool, bool]:
        """True per skill wherever the share is strictly positive."""
        return tuple(w > 0.0 for w in self.weights)  # type: ignore[return-value]

    def as_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=np.float64)


@dataclass(frozen=True)
class Regime:
    """A named family of five role profiles, Level 1 through Level 5."""

    name: str
    profiles: tuple[RoleProfile, RoleProfile, RoleProfile, RoleProfile, RoleProfile]

    def __post_init__(self) -> None:
        if len(self.profiles) != N_LEVELS:
            raise ValueError(f"regime needs {N_LEVELS} profiles, got {len(self.profiles)}")

    def profile(self, level: int) -> RoleProfile:
        if level not in LEVELS:
            raise ValueError(f"level {level!r} outside 1..{N_LEVELS}")
        return self.profiles[level - 1]

    def weight_matrix(self) -> np.ndarray:
        """(6, 4) weight rows indexed directly by level; row 0 is unused zeros."""
        rows = np.zeros((N_LEVELS + 1, N_SKILLS), dtype=np.float64)
        for lvl in LEVELS:
            rows[lvl] = self.profiles[lvl - 1].as_array()
        return rows

    def weight_table(self) -> list[list[float]]:
        return [list(p.weights) for p in self.profiles]


def _regime(name: str, rows: Iterable[tuple[float, float, float, float]]) -> Regime:
    return Regime(name, tuple(RoleProfile(r) for r in rows))  # type: ignore[arg-type]


#: Sharp pivot from technical execution to management/compliance between levels.
HIGH_MISMATCH = _regime(
    "high_mismatch",
    [
        (0.9, 0.0, 0.0, 0.1),
        (0.5, 0.3, 0.0, 0.2),
        (0.0, 0.5, 0.3, 0.2),
        (0.0, 0.7, 0.1, 0.2),
        (0.0, 0.8, 0.1, 0.1),
    ],
)

#: Technical depth stays productive through mid-levels; demands shift gradually.
TRANSFERABLE = _regime(
    "transferable",
    [
        (0.9, 0.0, 0.0, 0.1),
        (0.8, 0.1, 0.0, 0.1),
        (0.65, 0.15, 0.1, 0.1),
        (0.4, 0.2, 0.2, 0.2),
        (0.2, 0.4, 0.3, 0.1),
    ],
)

REGIMES: dict[str, Regime] = {
    HIGH_MISMATCH.name: HIGH_MISMATCH,
    TRANSFERABLE.name: TRANSFERABLE,
}


@dataclass
class Agent:
    """Read-only snapshot of one agent's state.

    The engine keeps agent attributes in dense arrays; this view exists for
    API payloads, ordering helpers and tests. The cached ``performance`` is
    always recomputable from (competence, level, regime).
    """

    id: int
    level: int
    tenure_years: int
    competence: CompetenceVector
    performance: float
    just_promoted: bool = False
    blacklisted: bool = False
    joined_at: int = 0
    exited_at: Optional[int] = None


def compute_performance(c: CompetenceVector, w: RoleProfile) -> float:
    """Clipped dot product of competence with the role's demand shares.

    Weights sum to one and components sit in [0, 1], so the clip is purely a
    numerical safety net. Term order is pinned; see module docstring.
    """
    w0, w1, w2, w3 = w.weights
    raw = c.tech * w0 + c.mgmt * w1 + c.comp * w2 + c.soft * w3
    return min(1.0, max(0.0, raw))


def total_competence(c: CompetenceVector) -> float:
    """Unweighted skill sum, in [0, 4]; descriptive only, never drives dynamics."""
    return c.tech + c.mgmt + c.comp + c.soft


def performance_under_weights(competence: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Vectorized kernel for one weight row: competence (n, 4) -> (n,)."""
    raw = (
        competence[:, 0] * weights[0]
        + competence[:, 1] * weights[1]
        + competence[:, 2] * weights[2]
        + competence[:, 3] * weights[3]
    )
    return np.clip(raw, 0.0, 1.0)


def performance_at_levels(
    competence: np.ndarray, levels: np.ndarray, weight_matrix: np.ndarray
) -> np.ndarray:
    """Vectorized kernel for per-agent levels.

    ``levels`` indexes rows of ``weight_matrix`` (level 0 rows are zero and
    only appear for inactive slots).
    """
    rows = weight_matrix[levels]
    raw = (
        competence[:, 0] * rows[:, 0]
        + competence[:, 1] * rows[:, 1]
        + competence[:, 2] * rows[:, 2]
        + competence[:, 3] * rows[:, 3]
    )
    return np.clip(raw, 0.0, 1.0)
