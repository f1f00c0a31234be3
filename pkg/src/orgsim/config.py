"""Scenario configuration: defaults, validation and dict conversion.

A scenario is everything needed to reproduce a run: population size,
horizon, seed, regime (named preset or explicit weight table), level shares,
attrition rates, tenure bands, the relaxation grid and the strategy knobs.
Validation errors carry the offending field path so both the CLI and the
HTTP API can point at the exact field.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Sequence

from .domain import N_LEVELS, N_SKILLS, REGIMES, Regime, RoleProfile, WEIGHT_SUM_TOL
from .seeding import (
    DEFAULT_LEVEL_SHARES,
    DEFAULT_RELAXATION_GRID,
    TenureBands,
    validate_shares,
)
from .strategies import StrategyConfig, StrategyKind, TenureNorm, TrainingMode

DEFAULT_ATTRITION_RATES = (0.05, 0.02, 0.01, 0.005, 0.002)


class ScenarioError(ValueError):
    """Invalid scenario field; ``field`` is a dotted path like 'strategy.kind'."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    n_agents: int = 100_000
    steps: int = 100
    seed: int = 42
    regime: Regime = REGIMES["high_mismatch"]
    level_shares: tuple[float, ...] = DEFAULT_LEVEL_SHARES
    attrition_rates: tuple[float, ...] = DEFAULT_ATTRITION_RATES
    tenure_bands: TenureBands = field(default_factory=TenureBands)
    relaxation_grid: tuple[float, ...] = DEFAULT_RELAXATION_GRID
    strategy: StrategyConfig = field(default_factory=StrategyConfig)

    def resolved_strategy(self) -> StrategyConfig:
        """Strategy with the tenure cap defaulted from the bands' maximum."""
        bands_max = max(hi for _, hi in self.tenure_bands.ranges)
        return self.strategy.resolved(bands_max)

    def with_overrides(self, **kwargs: Any) -> "ScenarioConfig":
        strategy_fields = {k: v for k, v in kwargs.items() if k in _STRATEGY_FIELDS}
        top = {k: v for k, v in kwargs.items() if k not in _STRATEGY_FIELDS}
        for key, enum_cls in _STRATEGY_ENUMS.items():
            if key in strategy_fields:
                strategy_fields[key] = enum_cls(strategy_fields[key])
        cfg = replace(self, **top) if top else self
        if strategy_fields:
            cfg = replace(cfg, strategy=replace(cfg.strategy, **strategy_fields))
        return cfg


_STRATEGY_FIELDS = frozenset(
    (
        "kind",
        "performance_gate",
        "tenure_gate",
        "performance_weight",
        "score_gate",
        "tenure_norm",
        "tenure_cap",
        "demotion_tolerance",
        "training_mode",
        "training_gain",
    )
)

_STRATEGY_ENUMS = {
    "kind": StrategyKind,
    "tenure_norm": TenureNorm,
    "training_mode": TrainingMode,
}


def validate_config(config: ScenarioConfig) -> None:
    """Raise ScenarioError naming the first offending field, if any."""
    if config.n_agents < 1:
        raise ScenarioError("n_agents", "must be >= 1")
    if config.steps < 0:
        raise ScenarioError("steps", "must be >= 0")
    try:
        validate_shares(config.level_shares)
    except ValueError as exc:
        raise ScenarioError("level_shares", str(exc)) from None
    if len(config.attrition_rates) != N_LEVELS:
        raise ScenarioError("attrition_rates", f"need {N_LEVELS} entries")
    for i, rate in enumerate(config.attrition_rates):
        if not 0.0 <= rate < 1.0:
            raise ScenarioError(f"attrition_rates[{i}]", f"{rate!r} outside [0, 1)")
    _validate_grid(config.relaxation_grid)
    _validate_strategy(config.strategy)
    # Regime and tenure bands validate in their constructors; reaching here
    # means they were already structurally sound.


def _validate_grid(grid: Sequence[float]) -> None:
    if len(grid) == 0:
        raise ScenarioError("relaxation_grid", "must not be empty")
    for i, rho in enumerate(grid):
        if not 0.0 <= rho <= 1.0:
            raise ScenarioError(f"relaxation_grid[{i}]", f"{rho!r} outside [0, 1]")
    if list(grid) != sorted(grid):
        raise ScenarioError("relaxation_grid", "must be non-decreasing")
    if grid[-1] != 1.0:
        raise ScenarioError("relaxation_grid", "must end at 1.0 so seeding always fills")


def _validate_strategy(s: StrategyConfig) -> None:
    if not 0.0 <= s.performance_gate <= 1.0:
        raise ScenarioError("strategy.performance_gate", "outside [0, 1]")
    if s.tenure_gate < 0:
        raise ScenarioError("strategy.tenure_gate", "must be non-negative")
    if not 0.0 <= s.performance_weight <= 1.0:
        raise ScenarioError("strategy.performance_weight", "outside [0, 1]")
    if s.tenure_cap is not None and s.tenure_cap <= 0:
        raise ScenarioError("strategy.tenure_cap", "must be positive")
    if s.demotion_tolerance < 0:
        raise ScenarioError("strategy.demotion_tolerance", "must be non-negative")
    if s.training_gain < 0:
        raise ScenarioError("strategy.training_gain", "must be non-negative")


# -- dict conversion ---------------------------------------------------------

_TOP_LEVEL_KEYS = {
    "n_agents",
    "steps",
    "seed",
    "regime",
    "level_shares",
    "attrition_rates",
    "tenure_bands",
    "relaxation_grid",
    "strategy",
}


def config_from_dict(data: Optional[Mapping[str, Any]]) -> ScenarioConfig:
    """Build a validated config from a plain mapping; omitted fields default.

    An empty document yields the full default configuration.
    """
    data = dict(data or {})
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ScenarioError(sorted(unknown)[0], "unknown field")

    kwargs: dict[str, Any] = {}
    if "n_agents" in data:
        kwargs["n_agents"] = _as_int("n_agents", data["n_agents"])
    if "steps" in data:
        kwargs["steps"] = _as_int("steps", data["steps"])
    if "seed" in data:
        kwargs["seed"] = _as_int("seed", data["seed"])
    if "regime" in data:
        kwargs["regime"] = _regime_from(data["regime"])
    if "level_shares" in data:
        kwargs["level_shares"] = _as_float_tuple("level_shares", data["level_shares"], N_LEVELS)
    if "attrition_rates" in data:
        kwargs["attrition_rates"] = _as_float_tuple(
            "attrition_rates", data["attrition_rates"], N_LEVELS
        )
    if "tenure_bands" in data:
        kwargs["tenure_bands"] = _bands_from(data["tenure_bands"])
    if "relaxation_grid" in data:
        grid = data["relaxation_grid"]
        if not isinstance(grid, Sequence) or isinstance(grid, str):
            raise ScenarioError("relaxation_grid", "expected a list of numbers")
        kwargs["relaxation_grid"] = tuple(float(v) for v in grid)
    if "strategy" in data:
        kwargs["strategy"] = _strategy_from(data["strategy"])

    config = ScenarioConfig(**kwargs)
    validate_config(config)
    return config


def config_to_dict(config: ScenarioConfig) -> dict[str, Any]:
    """Plain-data echo of a config; inverse of config_from_dict."""
    return {
        "n_agents": config.n_agents,
        "steps": config.steps,
        "seed": config.seed,
        "regime": {
            "name": config.regime.name,
            "weights": config.regime.weight_table(),
        },
        "level_shares": list(config.level_shares),
        "attrition_rates": list(config.attrition_rates),
        "tenure_bands": {
            "ranges": [list(r) for r in config.tenure_bands.ranges],
            "jitter_half_width": config.tenure_bands.jitter_half_width,
        },
        "relaxation_grid": list(config.relaxation_grid),
        "strategy": {
            "kind": config.strategy.kind.value,
            "performance_gate": config.strategy.performance_gate,
            "tenure_gate": config.strategy.tenure_gate,
            "performance_weight": config.strategy.performance_weight,
            "score_gate": config.strategy.score_gate,
            "tenure_norm": config.strategy.tenure_norm.value,
            "tenure_cap": config.strategy.tenure_cap,
            "demotion_tolerance": config.strategy.demotion_tolerance,
            "training_mode": config.strategy.training_mode.value,
            "training_gain": config.strategy.training_gain,
        },
    }


def _as_int(path: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ScenarioError(path, f"expected an integer, got {value!r}")
    return int(value)


def _as_float_tuple(path: str, value: Any, expected_len: int) -> tuple[float, ...]:
    if not isinstance(value, Sequence) or isinstance(value, str):
        raise ScenarioError(path, "expected a list of numbers")
    if len(value) != expected_len:
        raise ScenarioError(path, f"expected {expected_len} entries, got {len(value)}")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ScenarioError(path, "entries must be numbers") from None


def _regime_from(value: Any) -> Regime:
    if isinstance(value, str):
        if value not in REGIMES:
            options = ", ".join(sorted(REGIMES))
            raise ScenarioError("regime", f"unknown preset {value!r} (options: {options})")
        return REGIMES[value]
    if isinstance(value, Mapping):
        name = value.get("name", "custom")
        table = value.get("weights")
    else:
        name, table = "custom", value
    if not isinstance(table, Sequence) or len(table) != N_LEVELS:
        raise ScenarioError("regime.weights", f"expected {N_LEVELS} weight rows")
    profiles = []
    for i, row in enumerate(table):
        weights = _as_float_tuple(f"regime.weights[{i}]", row, N_SKILLS)
        total = sum(weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ScenarioError(
                f"regime.weights[{i}]", f"level {i + 1} weights sum to {total!r}, expected 1.0"
            )
        try:
            profiles.append(RoleProfile(weights))
        except ValueError as exc:
            raise ScenarioError(f"regime.weights[{i}]", str(exc)) from None
    return Regime(str(name), tuple(profiles))


def _bands_from(value: Any) -> TenureBands:
    if not isinstance(value, Mapping):
        raise ScenarioError("tenure_bands", "expected a mapping with 'ranges'")
    ranges = value.get("ranges")
    if not isinstance(ranges, Sequence) or len(ranges) != N_LEVELS:
        raise ScenarioError("tenure_bands.ranges", f"expected {N_LEVELS} [lo, hi] pairs")
    parsed = []
    for i, pair in enumerate(ranges):
        if not isinstance(pair, Sequence) or len(pair) != 2:
            raise ScenarioError(f"tenure_bands.ranges[{i}]", "expected [lo, hi]")
        lo, hi = (_as_int(f"tenure_bands.ranges[{i}]", v) for v in pair)
        parsed.append((lo, hi))
    jitter = _as_int(
        "tenure_bands.jitter_half_width", value.get("jitter_half_width", 5)
    )
    try:
        return TenureBands(tuple(parsed), jitter)
    except ValueError as exc:
        raise ScenarioError("tenure_bands", str(exc)) from None


def _strategy_from(value: Any) -> StrategyConfig:
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, Mapping):
        raise ScenarioError("strategy", "expected a mapping or a strategy name")
    known = {
        "kind",
        "performance_gate",
        "tenure_gate",
        "performance_weight",
        "score_gate",
        "tenure_norm",
        "tenure_cap",
        "demotion_tolerance",
        "training_mode",
        "training_gain",
    }
    unknown = set(value) - known
    if unknown:
        raise ScenarioError(f"strategy.{sorted(unknown)[0]}", "unknown field")

    kwargs: dict[str, Any] = {}
    if "kind" in value:
        kwargs["kind"] = _enum_from("strategy.kind", StrategyKind, value["kind"])
    if "tenure_norm" in value:
        kwargs["tenure_norm"] = _enum_from("strategy.tenure_norm", TenureNorm, value["tenure_norm"])
    if "training_mode" in value:
        kwargs["training_mode"] = _enum_from(
            "strategy.training_mode", TrainingMode, value["training_mode"]
        )
    for key in ("performance_gate", "performance_weight", "score_gate", "demotion_tolerance", "training_gain"):
        if key in value:
            kwargs[key] = _as_float(f"strategy.{key}", value[key])
    if "tenure_gate" in value:
        kwargs["tenure_gate"] = _as_int("strategy.tenure_gate", value["tenure_gate"])
    if "tenure_cap" in value and value["tenure_cap"] is not None:
        kwargs["tenure_cap"] = _as_float("strategy.tenure_cap", value["tenure_cap"])
    return StrategyConfig(**kwargs)


def _as_float(path: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, f"expected a number, got {value!r}")
    return float(value)


def _enum_from(path: str, enum_cls: Any, value: Any) -> Any:
    try:
        return enum_cls(value)
    except ValueError:
        options = ", ".join(e.value for e in enum_cls)
        raise ScenarioError(path, f"unknown value {value!r} (options: {options})") from None
