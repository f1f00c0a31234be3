"""orgsim: deterministic promotion-policy simulator for a five-level hierarchy."""

__version__ = "0.1.0"

from .config import ScenarioConfig, ScenarioError, config_from_dict, config_to_dict
from .domain import (
    Agent,
    CompetenceVector,
    HIGH_MISMATCH,
    REGIMES,
    Regime,
    RoleProfile,
    TRANSFERABLE,
    compute_performance,
    total_competence,
)
from .engine import RunResult, run_simulation, run_strategies
from .seeding import TenureBands, compute_capacities, initialize_org
from .strategies import (
    PromotionEvent,
    StrategyConfig,
    StrategyKind,
    TenureNorm,
    TrainingMode,
)

__all__ = [
    "Agent",
    "CompetenceVector",
    "HIGH_MISMATCH",
    "REGIMES",
    "Regime",
    "RoleProfile",
    "RunResult",
    "ScenarioConfig",
    "ScenarioError",
    "StrategyConfig",
    "StrategyKind",
    "TenureBands",
    "TenureNorm",
    "TrainingMode",
    "TRANSFERABLE",
    "PromotionEvent",
    "compute_capacities",
    "compute_performance",
    "config_from_dict",
    "config_to_dict",
    "initialize_org",
    "run_simulation",
    "run_strategies",
    "total_competence",
    "__version__",
]
