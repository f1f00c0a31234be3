// Pure transforms from API payloads to renderable structures. Nothing here
// recomputes simulation quantities: every number is passed through from the
// server; the most these helpers do is select, group and sort.

import type {
  ComparisonRow,
  DeltaSummaryResponse,
  EventRow,
  PathCell,
  TrajectoryPoint,
  CompetenceSnapshot,
} from "./types.js";

export interface SeriesPoint {
  x: number;
  y: number;
}

export interface ChartSeries {
  label: string;
  points: SeriesPoint[];
}

export function efficiencyChart(
  runs: { label: string; efficiency: number[] }[],
): ChartSeries[] {
  return runs.map((run) => ({
    label: run.label,
    points: run.efficiency.map((value, step) => ({ x: step, y: value })),
  }));
}

/** The shared first point of all series, or null when origins differ. */
export function sharedOrigin(series: ChartSeries[]): number | null {
  if (series.length === 0 || series.some((s) => s.points.length === 0)) {
    return null;
  }
  const first = series[0].points[0].y;
  return series.every((s) => s.points[0].y === first) ? first : null;
}

export interface HistogramBar {
  x0: number;
  x1: number;
  count: number;
}

export function histogramBars(summary: DeltaSummaryResponse): HistogramBar[] {
  const { edges, counts } = summary.histogram;
  return counts.map((count, i) => ({ x0: edges[i], x1: edges[i + 1], count }));
}

export interface HeatmapCell {
  row: number; // from_level - 1
  col: number; // to_level - 1
  value: number;
  count: number;
}

export function heatmapCells(cells: PathCell[]): HeatmapCell[] {
  return cells.map((cell) => ({
    row: cell.from_level - 1,
    col: cell.to_level - 1,
    value: cell.mean_delta,
    count: cell.count,
  }));
}

export function negativeBars(counts: number[]): SeriesPoint[] {
  return counts.map((count, i) => ({ x: i + 1, y: count }));
}

/**
 * Agent ids affected at one timestep: the server is queried with
 * from=step&to=step and this keeps the rows whose server-reported shock is
 * negative (a display filter over server numbers, not a recomputation).
 */
export function affectedAgents(events: EventRow[]): number[] {
  return events.filter((e) => e.delta_p < 0).map((e) => e.agent_id);
}

export function comparisonByFinalEfficiency(rows: ComparisonRow[]): ComparisonRow[] {
  return [...rows].sort((a, b) => b.final_efficiency - a.final_efficiency);
}

export interface LevelBand {
  level: number;
  fromStep: number;
  toStep: number;
}

/** Contiguous level segments of a trajectory, for the band overlay. */
export function levelBands(points: TrajectoryPoint[]): LevelBand[] {
  const bands: LevelBand[] = [];
  for (const point of points) {
    const last = bands[bands.length - 1];
    if (last !== undefined && last.level === point.level) {
      last.toStep = point.step;
    } else {
      bands.push({ level: point.level, fromStep: point.step, toStep: point.step });
    }
  }
  return bands;
}

export interface SkillRow {
  step: number;
  skills: Record<string, number>;
  changed: Record<string, boolean>;
}

/** Competence snapshots with per-skill change flags for table highlighting. */
export function skillChangeRows(snapshots: CompetenceSnapshot[]): SkillRow[] {
  const rows: SkillRow[] = [];
  let previous: Record<string, number> | null = null;
  for (const snap of snapshots) {
    const changed: Record<string, boolean> = {};
    for (const key of Object.keys(snap.skills)) {
      changed[key] = previous !== null && snap.skills[key] !== previous[key];
    }
    rows.push({ step: snap.step, skills: snap.skills, changed });
    previous = snap.skills;
  }
  return rows;
}

export function shortId(runId: string): string {
  return runId.length > 8 ? runId.slice(0, 8) : runId;
}
