// Thin fetch client for API v1.

import type {
  AgentResponse,
  ApiFieldError,
  ComparisonResponse,
  CreateRunResponse,
  DeltaSummaryResponse,
  EfficiencyResponse,
  EventsResponse,
  NegativesResponse,
  PathMatrixResponse,
  RunListEntry,
  ScenarioBody,
  StatusResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly fieldError: ApiFieldError | null = null,
  ) {
    super(message);
  }
}

const BASE = "/api/v1";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${BASE}${path}`, init);
  if (!response.ok) {
    let detail: unknown = null;
    try {
      detail = (await response.json()).detail;
    } catch {
      // non-JSON error body; fall through with a generic message
    }
    if (detail !== null && typeof detail === "object" && "field" in (detail as object)) {
      const fieldError = detail as ApiFieldError;
      throw new ApiError(response.status, fieldError.message, fieldError);
    }
    throw new ApiError(response.status, typeof detail === "string" ? detail : response.statusText);
  }
  return (await response.json()) as T;
}

export const api = {
  createRun(body: ScenarioBody): Promise<CreateRunResponse> {
    return request(`/runs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  },
  listRuns(): Promise<{ runs: RunListEntry[] }> {
    return request(`/runs`);
  },
  status(runId: string): Promise<StatusResponse> {
    return request(`/runs/${runId}/status`);
  },
  efficiency(runId: string): Promise<EfficiencyResponse> {
    return request(`/runs/${runId}/efficiency`);
  },
  deltaSummary(runId: string): Promise<DeltaSummaryResponse> {
    return request(`/runs/${runId}/delta_summary`);
  },
  pathMatrix(runId: string): Promise<PathMatrixResponse> {
    return request(`/runs/${runId}/path_matrix`);
  },
  negatives(runId: string): Promise<NegativesResponse> {
    return request(`/runs/${runId}/negatives`);
  },
  eventsAtStep(runId: string, step: number): Promise<EventsResponse> {
    return request(`/runs/${runId}/events?from=${step}&to=${step}`);
  },
  agent(runId: string, agentId: number): Promise<AgentResponse> {
    return request(`/runs/${runId}/agent/${agentId}`);
  },
  comparison(runIds: string[]): Promise<ComparisonResponse> {
    return request(`/comparison?ids=${runIds.join(",")}`);
  },
};
