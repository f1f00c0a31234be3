// Client-side mirror of the server's scenario validation. Field paths match
// the server's 400 diagnostics so both surface at the same form inputs.

import type { ScenarioBody, StrategyBody } from "./types.js";

export interface FieldError {
  field: string;
  message: string;
}

const SUM_TOLERANCE = 1e-9;

export function sumsToOne(values: number[]): boolean {
  const total = values.reduce((acc, v) => acc + v, 0);
  return Math.abs(total - 1.0) <= SUM_TOLERANCE;
}

export function validateScenario(body: ScenarioBody): FieldError[] {
  const errors: FieldError[] = [];

  if (body.n_agents !== undefined && (!Number.isInteger(body.n_agents) || body.n_agents < 1)) {
    errors.push({ field: "n_agents", message: "must be an integer >= 1" });
  }
  if (body.steps !== undefined && (!Number.isInteger(body.steps) || body.steps < 0)) {
    errors.push({ field: "steps", message: "must be an integer >= 0" });
  }
  if (body.seed !== undefined && !Number.isInteger(body.seed)) {
    errors.push({ field: "seed", message: "must be an integer" });
  }

  if (body.level_shares !== undefined) {
    if (body.level_shares.length !== 5) {
      errors.push({ field: "level_shares", message: "need 5 entries" });
    } else if (body.level_shares.some((s) => !(s >= 0))) {
      errors.push({ field: "level_shares", message: "shares must be non-negative" });
    } else if (!sumsToOne(body.level_shares)) {
      errors.push({ field: "level_shares", message: "shares must sum to 1" });
    }
  }

  if (body.attrition_rates !== undefined) {
    if (body.attrition_rates.length !== 5) {
      errors.push({ field: "attrition_rates", message: "need 5 entries" });
    } else {
      body.attrition_rates.forEach((rate, i) => {
        if (!(rate >= 0 && rate < 1)) {
          errors.push({ field: `attrition_rates[${i}]`, message: "rate outside [0, 1)" });
        }
      });
    }
  }

  if (body.regime !== undefined && typeof body.regime !== "string") {
    const table = body.regime.weights;
    if (!table || table.length !== 5) {
      errors.push({ field: "regime.weights", message: "need 5 weight rows" });
    } else {
      table.forEach((row, i) => {
        if (row.length !== 4) {
          errors.push({ field: `regime.weights[${i}]`, message: "need 4 weights" });
        } else if (row.some((w) => !(w >= 0 && w <= 1))) {
          errors.push({ field: `regime.weights[${i}]`, message: "weights must be in [0, 1]" });
        } else if (!sumsToOne(row)) {
          errors.push({ field: `regime.weights[${i}]`, message: `level ${i + 1} weights must sum to 1` });
        }
      });
    }
  }

  if (body.strategy !== undefined && typeof body.strategy !== "string") {
    errors.push(...validateStrategy(body.strategy));
  }
  return errors;
}

function validateStrategy(strategy: StrategyBody): FieldError[] {
  const errors: FieldError[] = [];
  const inUnit = (value: number | undefined, field: string) => {
    if (value !== undefined && !(value >= 0 && value <= 1)) {
      errors.push({ field, message: "must be in [0, 1]" });
    }
  };
  inUnit(strategy.performance_gate, "strategy.performance_gate");
  inUnit(strategy.performance_weight, "strategy.performance_weight");
  inUnit(strategy.score_gate, "strategy.score_gate");
  if (
    strategy.tenure_gate !== undefined &&
    (!Number.isInteger(strategy.tenure_gate) || strategy.tenure_gate < 0)
  ) {
    errors.push({ field: "strategy.tenure_gate", message: "must be an integer >= 0" });
  }
  if (strategy.demotion_tolerance !== undefined && !(strategy.demotion_tolerance >= 0)) {
    errors.push({ field: "strategy.demotion_tolerance", message: "must be non-negative" });
  }
  if (
    strategy.tenure_cap !== undefined &&
    strategy.tenure_cap !== null &&
    !(strategy.tenure_cap > 0)
  ) {
    errors.push({ field: "strategy.tenure_cap", message: "must be positive" });
  }
  if (strategy.training_gain !== undefined && !(strategy.training_gain >= 0)) {
    errors.push({ field: "strategy.training_gain", message: "must be non-negative" });
  }
  return errors;
}
