// Payload shapes for API v1 (see docs/api.md in the repository root).

export type RunStatus = "pending" | "running" | "done" | "failed";

export interface StrategyBody {
  kind?: string;
  performance_gate?: number;
  tenure_gate?: number;
  performance_weight?: number;
  score_gate?: number;
  tenure_norm?: string;
  tenure_cap?: number | null;
  demotion_tolerance?: number;
  training_mode?: string;
  training_gain?: number;
}

export interface ScenarioBody {
  n_agents?: number;
  steps?: number;
  seed?: number;
  regime?: string | { name?: string; weights: number[][] };
  level_shares?: number[];
  attrition_rates?: number[];
  strategy?: StrategyBody | string;
}

export interface CreateRunResponse {
  run_id: string;
  status: RunStatus;
}

export interface StatusResponse {
  run_id: string;
  status: RunStatus;
  error?: string;
}

export interface RunListEntry {
  run_id: string;
  status: RunStatus;
  strategy: string;
  regime: string;
  n_agents: number;
  steps: number;
  seed: number;
}

export interface EfficiencyResponse {
  run_id: string;
  efficiency: number[];
}

export interface DeltaSummaryResponse {
  run_id: string;
  count: number;
  mean: number;
  median: number;
  share_negative: number;
  share_large_negative: number;
  min: number;
  max: number;
  p01: number;
  p99: number;
  histogram: { edges: number[]; counts: number[] };
}

export interface PathCell {
  from_level: number;
  to_level: number;
  count: number;
  mean_delta: number;
  positive: number;
  negative: number;
}

export interface PathMatrixResponse {
  run_id: string;
  cells: PathCell[];
}

export interface NegativesResponse {
  run_id: string;
  counts: number[];
}

export interface EventRow {
  agent_id: number;
  step: number;
  from_level: number;
  to_level: number;
  perf_pre: number;
  perf_post: number;
  delta_p: number;
  cause: string;
}

export interface EventsResponse {
  run_id: string;
  events: EventRow[];
}

export interface TrajectoryPoint {
  step: number;
  level: number;
  performance: number;
}

export interface CompetenceSnapshot {
  step: number;
  skills: Record<string, number>;
}

export interface AgentResponse {
  run_id: string;
  agent_id: number;
  joined_at: number;
  exited_at: number | null;
  blacklisted: boolean;
  points: TrajectoryPoint[];
  competence_snapshots: CompetenceSnapshot[];
}

export interface ComparisonRow {
  run_id: string;
  strategy: string;
  mean_delta_p: number;
  median_delta_p: number;
  share_negative: number;
  promotions: number;
  final_efficiency: number;
}

export interface ComparisonResponse {
  rows: ComparisonRow[];
}

export interface ApiFieldError {
  field: string;
  message: string;
}
