// Small hand-rolled canvas charts: multi-series lines, bars and a heatmap.

import type { ChartSeries, HeatmapCell, HistogramBar, SeriesPoint, LevelBand } from "./viewmodel.js";

export const PALETTE = [
  "#2563eb",
  "#dc2626",
  "#16a34a",
  "#9333ea",
  "#ea580c",
  "#0891b2",
  "#ca8a04",
  "#db2777",
];

const MARGIN = { top: 16, right: 14, bottom: 30, left: 52 };

interface Scale {
  (value: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

function clearContext(canvas: HTMLCanvasElement): CanvasRenderingContext2D {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    throw new Error("canvas 2d context not available");
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "11px system-ui, sans-serif";
  return ctx;
}

function drawAxes(
  ctx: CanvasRenderingContext2D,
  canvas: HTMLCanvasElement,
  x: Scale,
  y: Scale,
  xDomain: [number, number],
  yDomain: [number, number],
): void {
  const bottom = canvas.height - MARGIN.bottom;
  ctx.strokeStyle = "#9ca3af";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(MARGIN.left, MARGIN.top);
  ctx.lineTo(MARGIN.left, bottom);
  ctx.lineTo(canvas.width - MARGIN.right, bottom);
  ctx.stroke();

  ctx.fillStyle = "#4b5563";
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const value = yDomain[0] + ((yDomain[1] - yDomain[0]) * i) / ticks;
    const py = y(value);
    ctx.textAlign = "right";
    ctx.textBaseline = "middle";
    ctx.fillText(value.toPrecision(3), MARGIN.left - 6, py);
    ctx.strokeStyle = "#e5e7eb";
    ctx.beginPath();
    ctx.moveTo(MARGIN.left, py);
    ctx.lineTo(canvas.width - MARGIN.right, py);
    ctx.stroke();
  }
  for (let i = 0; i <= ticks; i++) {
    const value = xDomain[0] + ((xDomain[1] - xDomain[0]) * i) / ticks;
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    ctx.fillStyle = "#4b5563";
    ctx.fillText(Math.round(value).toString(), x(value), bottom + 6);
  }
}

function domains(points: SeriesPoint[]): { x: [number, number]; y: [number, number] } {
  let x0 = Infinity;
  let x1 = -Infinity;
  let y0 = Infinity;
  let y1 = -Infinity;
  for (const p of points) {
    x0 = Math.min(x0, p.x);
    x1 = Math.max(x1, p.x);
    y0 = Math.min(y0, p.y);
    y1 = Math.max(y1, p.y);
  }
  if (!isFinite(x0)) {
    return { x: [0, 1], y: [0, 1] };
  }
  const pad = (y1 - y0) * 0.08 || 0.01;
  return { x: [x0, x1], y: [y0 - pad, y1 + pad] };
}

export function drawLineChart(
  canvas: HTMLCanvasElement,
  series: ChartSeries[],
  bands: LevelBand[] = [],
): void {
  const ctx = clearContext(canvas);
  const all = series.flatMap((s) => s.points);
  const { x: xd, y: yd } = domains(all);
  const x = linearScale(xd[0], xd[1], MARGIN.left, canvas.width - MARGIN.right);
  const y = linearScale(yd[0], yd[1], canvas.height - MARGIN.bottom, MARGIN.top);

  // Level bands sit behind the lines (agent inspector view).
  for (const band of bands) {
    ctx.fillStyle = `rgba(37, 99, 235, ${0.05 + 0.05 * band.level})`;
    const x0 = x(Math.max(band.fromStep - 0.5, xd[0]));
    const x1 = x(Math.min(band.toStep + 0.5, xd[1]));
    ctx.fillRect(x0, MARGIN.top, x1 - x0, canvas.height - MARGIN.top - MARGIN.bottom);
    ctx.fillStyle = "#1e40af";
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    ctx.fillText(`L${band.level}`, (x0 + x1) / 2, MARGIN.top + 2);
  }

  drawAxes(ctx, canvas, x, y, xd, yd);

  series.forEach((s, i) => {
    ctx.strokeStyle = PALETTE[i % PALETTE.length];
    ctx.lineWidth = 1.8;
    ctx.beginPath();
    s.points.forEach((p, j) => {
      if (j === 0) {
        ctx.moveTo(x(p.x), y(p.y));
      } else {
        ctx.lineTo(x(p.x), y(p.y));
      }
    });
    ctx.stroke();
  });

  // Legend across the top.
  let lx = MARGIN.left + 4;
  series.forEach((s, i) => {
    ctx.fillStyle = PALETTE[i % PALETTE.length];
    ctx.fillRect(lx, 2, 10, 10);
    ctx.fillStyle = "#111827";
    ctx.textAlign = "left";
    ctx.textBaseline = "top";
    ctx.fillText(s.label, lx + 14, 2);
    lx += 14 + ctx.measureText(s.label).width + 16;
  });
}

export function drawHistogram(canvas: HTMLCanvasElement, bars: HistogramBar[]): void {
  const ctx = clearContext(canvas);
  if (bars.length === 0) {
    return;
  }
  const xd: [number, number] = [bars[0].x0, bars[bars.length - 1].x1];
  const maxCount = Math.max(...bars.map((b) => b.count), 1);
  const x = linearScale(xd[0], xd[1], MARGIN.left, canvas.width - MARGIN.right);
  const y = linearScale(0, maxCount, canvas.height - MARGIN.bottom, MARGIN.top);
  drawAxes(ctx, canvas, x, y, xd, [0, maxCount]);
  const bottom = canvas.height - MARGIN.bottom;
  for (const bar of bars) {
    ctx.fillStyle = bar.x1 <= 0 ? "#dc2626" : "#16a34a";
    const px = x(bar.x0);
    ctx.fillRect(px, y(bar.count), Math.max(x(bar.x1) - px - 0.5, 0.5), bottom - y(bar.count));
  }
  ctx.strokeStyle = "#111827";
  ctx.beginPath();
  ctx.moveTo(x(0), MARGIN.top);
  ctx.lineTo(x(0), bottom);
  ctx.stroke();

  // Hover reports the bin range and its count via the native tooltip.
  canvas.onmousemove = (event) => {
    const rect = canvas.getBoundingClientRect();
    const px = ((event.clientX - rect.left) / rect.width) * canvas.width;
    const value = xd[0] + ((px - MARGIN.left) / (canvas.width - MARGIN.left - MARGIN.right)) * (xd[1] - xd[0]);
    const bar = bars.find((b) => value >= b.x0 && value < b.x1);
    canvas.title = bar
      ? `[${bar.x0.toFixed(2)}, ${bar.x1.toFixed(2)}): ${bar.count} promotions`
      : "";
  };
}

export function drawBars(
  canvas: HTMLCanvasElement,
  points: SeriesPoint[],
  onPick?: (x: number) => void,
): void {
  const ctx = clearContext(canvas);
  if (points.length === 0) {
    return;
  }
  const xd: [number, number] = [points[0].x - 0.5, points[points.length - 1].x + 0.5];
  const maxY = Math.max(...points.map((p) => p.y), 1);
  const x = linearScale(xd[0], xd[1], MARGIN.left, canvas.width - MARGIN.right);
  const y = linearScale(0, maxY, canvas.height - MARGIN.bottom, MARGIN.top);
  drawAxes(ctx, canvas, x, y, xd, [0, maxY]);
  const bottom = canvas.height - MARGIN.bottom;
  const width = Math.max((x(1.5) - x(0.5)) - 1, 1);
  for (const p of points) {
    ctx.fillStyle = "#dc2626";
    ctx.fillRect(x(p.x - 0.5) + 0.5, y(p.y), width, bottom - y(p.y));
  }
  if (onPick) {
    canvas.onclick = (event) => {
      const rect = canvas.getBoundingClientRect();
      const px = ((event.clientX - rect.left) / rect.width) * canvas.width;
      const step = Math.round(xd[0] + ((px - MARGIN.left) / (canvas.width - MARGIN.left - MARGIN.right)) * (xd[1] - xd[0]));
      if (step >= points[0].x && step <= points[points.length - 1].x) {
        onPick(step);
      }
    };
  }
}

export function drawHeatmap(canvas: HTMLCanvasElement, cells: HeatmapCell[]): void {
  const ctx = clearContext(canvas);
  const n = 5;
  const left = 40;
  const top = 8;
  const size = Math.min((canvas.width - left - 8) / n, (canvas.height - top - 28) / n);
  const limit = Math.max(...cells.map((c) => Math.abs(c.value)), 0.05);

  for (let row = 0; row < n; row++) {
    for (let col = 0; col < n; col++) {
      ctx.fillStyle = "#f3f4f6";
      ctx.fillRect(left + col * size, top + row * size, size - 1, size - 1);
    }
  }
  for (const cell of cells) {
    const t = Math.max(-1, Math.min(1, cell.value / limit));
    ctx.fillStyle =
      t < 0
        ? `rgba(220, 38, 38, ${0.15 + 0.75 * -t})`
        : `rgba(22, 163, 74, ${0.15 + 0.75 * t})`;
    ctx.fillRect(left + cell.col * size, top + cell.row * size, size - 1, size - 1);
    ctx.fillStyle = "#111827";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(
      cell.value >= 0 ? `+${cell.value.toFixed(3)}` : cell.value.toFixed(3),
      left + cell.col * size + size / 2,
      top + cell.row * size + size / 2 - 6,
    );
    ctx.fillStyle = "#6b7280";
    ctx.fillText(`n=${cell.count}`, left + cell.col * size + size / 2, top + cell.row * size + size / 2 + 8);
  }
  ctx.fillStyle = "#4b5563";
  for (let i = 0; i < n; i++) {
    ctx.textAlign = "right";
    ctx.textBaseline = "middle";
    ctx.fillText(`L${i + 1}`, left - 6, top + i * size + size / 2);
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    ctx.fillText(`L${i + 1}`, left + i * size + size / 2, top + n * size + 6);
  }
}
