"""Mutable organization state and the seeded random-stream bundle.

Agent attributes live in parallel arrays indexed by agent id. Ids are handed
out in creation order and never reused; hires extend the arrays. Exited
agents keep their final attribute values and drop out of dynamics via the
``active`` mask, so trajectory queries can still see them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Agent, CompetenceVector, Regime, performance_at_levels

LEVEL_DTYPE = np.int8


@dataclass
class RngStreams:
    """Derived random substreams, one per draw site.

    The root seed spawns five child sequences in a fixed order so that extra
    draws in one phase never perturb another. The call sites are part of the
    determinism contract (see README): skills are drawn as one (n, 4) block
    per batch of created agents, tenure as two vectorized integer draws in
    assignment order, attrition as one choice-without-replacement per level
    (ascending, only when the exit count is positive), random orderings as
    one permutation per non-empty pool with vacancies (levels processed top
    down), and hiring skills as one (h, 4) block per step.
    """

    skills: np.random.Generator
    tenure: np.random.Generator
    attrition: np.random.Generator
    ordering: np.random.Generator
    hiring: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RngStreams":
        children = np.random.SeedSequence(seed).spawn(5)
        return cls(*(np.random.default_rng(c) for c in children))


class Organization:
    """Dense-array state for one simulated organization.

    ``caps`` is indexed directly by level (index 0 unused). All mutating
    passes run single-writer; reads of the exposed arrays are cheap views.
    """

    def __init__(
        self,
        regime: Regime,
        caps: np.ndarray,
        competence: np.ndarray,
        level: np.ndarray,
        tenure: np.ndarray,
        timestep: int = 0,
    ):
        n = competence.shape[0]
        if level.shape[0] != n or tenure.shape[0] != n:
            raise ValueError("competence, level and tenure must agree on length")
        self.regime = regime
        self.caps = np.asarray(caps, dtype=np.int64)
        self.weight_matrix = regime.weight_matrix()
        self.timestep = timestep

        self._n = n
        self._competence = np.array(competence, dtype=np.float64)
        self._base_competence = self._competence.copy()
        self._level = np.array(level, dtype=LEVEL_DTYPE)
        self._tenure = np.array(tenure, dtype=np.int32)
        self._performance = np.zeros(n, dtype=np.float64)
        self._just_promoted = np.zeros(n, dtype=bool)
        self._blacklisted = np.zeros(n, dtype=bool)
        self._active = np.ones(n, dtype=bool)
        self._joined_at = np.zeros(n, dtype=np.int32)
        self._exited_at = np.full(n, -1, dtype=np.int32)
        self.recompute_performance()

    # -- array views -------------------------------------------------------

    @property
    def n_total(self) -> int:
        return self._n

    @property
    def competence(self) -> np.ndarray:
        return self._competence[: self._n]

    @property
    def base_competence(self) -> np.ndarray:
        return self._base_competence[: self._n]

    @property
    def level(self) -> np.ndarray:
        return self._level[: self._n]

    @property
    def tenure(self) -> np.ndarray:
        return self._tenure[: self._n]

    @property
    def performance(self) -> np.ndarray:
        return self._performance[: self._n]

    @property
    def just_promoted(self) -> np.ndarray:
        return self._just_promoted[: self._n]

    @property
    def blacklisted(self) -> np.ndarray:
        return self._blacklisted[: self._n]

    @property
    def active(self) -> np.ndarray:
        return self._active[: self._n]

    @property
    def joined_at(self) -> np.ndarray:
        return self._joined_at[: self._n]

    @property
    def exited_at(self) -> np.ndarray:
        return self._exited_at[: self._n]

    # -- queries -----------------------------------------------------------

    def ids_at_level(self, level: int) -> np.ndarray:
        """Active agent ids at ``level``, ascending (creation order)."""
        return np.flatnonzero(self.active & (self.level == level))

    def level_counts(self) -> np.ndarray:
        """(6,) active headcount per level; index 0 unused."""
        return np.bincount(self.level[self.active], minlength=6).astype(np.int64)

    def active_count(self) -> int:
        return int(self.active.sum())

    def efficiency(self) -> float:
        """Mean performance across active agents."""
        return float(np.mean(self.performance[self.active]))

    def agent(self, agent_id: int) -> Agent:
        if not 0 <= agent_id < self._n:
            raise KeyError(f"unknown agent id {agent_id}")
        exited = int(self._exited_at[agent_id])
        return Agent(
            id=agent_id,
            level=int(self._level[agent_id]),
            tenure_years=int(self._tenure[agent_id]),
            competence=CompetenceVector(*self._competence[agent_id]),
            performance=float(self._performance[agent_id]),
            just_promoted=bool(self._just_promoted[agent_id]),
            blacklisted=bool(self._blacklisted[agent_id]),
            joined_at=int(self._joined_at[agent_id]),
            exited_at=None if exited < 0 else exited,
        )

    # -- mutation ----------------------------------------------------------

    def recompute_performance(self, ids: np.ndarray | None = None) -> None:
        """Refresh the cached performance from (competence, level, regime)."""
        if ids is None:
            mask = self.active
            self.performance[mask] = performance_at_levels(
                self.competence[mask], self.level[mask], self.weight_matrix
            )
        else:
            self.performance[ids] = performance_at_levels(
                self.competence[ids], self.level[ids], self.weight_matrix
            )

    def move_level(self, ids: np.ndarray, level: int) -> None:
        self.level[ids] = level
        self.recompute_performance(ids)

    def exit_agents(self, ids: np.ndarray, timestep: int) -> None:
        self.active[ids] = False
        self.exited_at[ids] = timestep

    def add_hires(self, skills: np.ndarray, level: int, timestep: int) -> np.ndarray:
        """Append fresh agents at ``level`` with zero tenure; returns their ids."""
        h = skills.shape[0]
        if h == 0:
            return np.empty(0, dtype=np.int64)
        start = self._n
        self._grow(start + h)
        ids = np.arange(start, start + h, dtype=np.int64)
        self._competence[ids] = skills
        self._base_competence[ids] = skills
        self._level[ids] = level
        self._tenure[ids] = 0
        self._just_promoted[ids] = False
        self._blacklisted[ids] = False
        self._active[ids] = True
        self._joined_at[ids] = timestep
        self._exited_at[ids] = -1
        self._n = start + h
        self.recompute_performance(ids)
        return ids

    def clone(self) -> "Organization":
        """Deep copy; used to fan one initialized org out across strategies."""
        dup = object.__new__(Organization)
        dup.regime = self.regime
        dup.caps = self.caps.copy()
        dup.weight_matrix = self.weight_matrix.copy()
        dup.timestep = self.timestep
        dup._n = self._n
        for name in (
            "_competence",
            "_base_competence",
            "_level",
            "_tenure",
            "_performance",
            "_just_promoted",
            "_blacklisted",
            "_active",
            "_joined_at",
            "_exited_at",
        ):
            setattr(dup, name, getattr(self, name)[: self._n].copy())
        return dup

    def _grow(self, needed: int) -> None:
        cap = self._competence.shape[0]
        if needed <= cap:
            return
        new_cap = max(needed, cap + cap // 2 + 64)
        for name, fill in (
            ("_competence", 0.0),
            ("_base_competence", 0.0),
            ("_level", 0),
            ("_tenure", 0),
            ("_performance", 0.0),
            ("_just_promoted", False),
            ("_blacklisted", False),
            ("_active", False),
            ("_joined_at", 0),
            ("_exited_at", -1),
        ):
            old = getattr(self, name)
            shape = (new_cap,) + old.shape[1:]
            grown = np.full(shape, fill, dtype=old.dtype)
            grown[: old.shape[0]] = old
            setattr(self, name, grown)
