// Dashboard wiring: submit scenarios, poll status, render the diagnostic
// views from server payloads, and drill into steps and agents.

import { api, ApiError } from "./api.js";
import { drawBars, drawHeatmap, drawHistogram, drawLineChart } from "./charts.js";
import { ScenarioForm } from "./form.js";
import { RunStore, storeKey } from "./storage.js";
import type { RunStatus } from "./types.js";
import { validateScenario } from "./validate.js";
import {
  affectedAgents,
  comparisonByFinalEfficiency,
  efficiencyChart,
  heatmapCells,
  histogramBars,
  levelBands,
  negativeBars,
  sharedOrigin,
  shortId,
  skillChangeRows,
} from "./viewmodel.js";

const POLL_INTERVAL_MS = 1000;

interface TrackedRun {
  run_id: string;
  label: string;
  status: RunStatus;
  selected: boolean;
}

class Dashboard {
  private readonly runs = new Map<string, TrackedRun>();
  private readonly store = new RunStore(window.localStorage, storeKey(window.location.host));
  private activeRun: string | null = null;
  private form!: ScenarioForm;

  private runList!: HTMLElement;
  private viewsRoot!: HTMLElement;

  async start(): Promise<void> {
    const root = document.getElementById("app");
    if (!root) {
      return;
    }
    root.innerHTML = "";

    const formSection = section("Scenario", "scenario");
    this.form = new ScenarioForm((body) => this.submit(body));
    formSection.append(this.form.root);

    const runsSection = section("Runs", "runs");
    this.runList = document.createElement("div");
    this.runList.className = "run-list";
    runsSection.append(this.runList);

    this.viewsRoot = section("Views", "views");
    root.append(formSection, runsSection, this.viewsRoot);

    await this.restore();
    this.renderRunList();
  }

  private async restore(): Promise<void> {
    const alive = new Set<string>();
    for (const stored of this.store.list()) {
      try {
        const status = await api.status(stored.run_id);
        this.runs.set(stored.run_id, {
          run_id: stored.run_id,
          label: stored.label,
          status: status.status,
          selected: false,
        });
        alive.add(stored.run_id);
        if (status.status === "pending" || status.status === "running") {
          this.poll(stored.run_id);
        }
      } catch {
        // Unknown to this server (restart without snapshots): drop it.
      }
    }
    this.store.keep(alive);
  }

  private async submit(body: ReturnType<ScenarioForm["read"]>): Promise<void> {
    const clientErrors = validateScenario(body);
    if (clientErrors.length > 0) {
      this.form.showErrors(clientErrors);
      return;
    }
    try {
      const created = await api.createRun(body);
      const kind = typeof body.strategy === "string" ? body.strategy : body.strategy?.kind ?? "merit";
      const label = `${kind} · ${shortId(created.run_id)}`;
      this.runs.set(created.run_id, {
        run_id: created.run_id,
        label,
        status: created.status,
        selected: false,
      });
      this.store.add({ run_id: created.run_id, label, submitted_at: Date.now() });
      this.renderRunList();
      this.poll(created.run_id);
    } catch (error) {
      if (error instanceof ApiError && error.fieldError) {
        this.form.showErrors([error.fieldError]);
      } else {
        this.form.showErrors([{ field: "", message: String(error) }]);
      }
    }
  }

  private poll(runId: string): void {
    const timer = window.setInterval(async () => {
      try {
        const status = await api.status(runId);
        const tracked = this.runs.get(runId);
        if (!tracked) {
          window.clearInterval(timer);
          return;
        }
        if (tracked.status !== status.status) {
          tracked.status = status.status;
          this.renderRunList();
          if (status.status === "done" && this.activeRun === null) {
            this.showRun(runId);
          }
        }
        if (status.status === "done" || status.status === "failed") {
          window.clearInterval(timer);
        }
      } catch {
        window.clearInterval(timer);
      }
    }, POLL_INTERVAL_MS);
  }

  private renderRunList(): void {
    this.runList.innerHTML = "";
    if (this.runs.size === 0) {
      this.runList.textContent = "No runs yet; launch one above.";
      return;
    }
    for (const run of this.runs.values()) {
      const row = document.createElement("div");
      row.className = "run-row";
      const checkbox = document.createElement("input");
      checkbox.type = "checkbox";
      checkbox.checked = run.selected;
      checkbox.disabled = run.status !== "done";
      checkbox.title = "select for multi-run views";
      checkbox.addEventListener("change", () => {
        run.selected = checkbox.checked;
        this.renderSelectedViews();
      });
      const label = document.createElement("button");
      label.type = "button";
      label.className = "run-label";
      label.textContent = run.label;
      label.disabled = run.status !== "done";
      label.addEventListener("click", () => this.showRun(run.run_id));
      const badge = document.createElement("span");
      badge.className = `badge badge-${run.status}`;
      badge.textContent = run.status === "pending" || run.status === "running" ? `${run.status}…` : run.status;
      row.append(checkbox, label, badge);
      this.runList.append(row);
    }
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "Tick several finished runs to overlay efficiency lines and build the comparison table.";
    this.runList.append(hint);
  }

  private selectedIds(): string[] {
    return [...this.runs.values()].filter((r) => r.selected && r.status === "done").map((r) => r.run_id);
  }

  private async renderSelectedViews(): Promise<void> {
    const ids = this.selectedIds();
    const host = this.panel("multi");
    host.innerHTML = "";
    if (ids.length < 2) {
      return;
    }
    host.append(heading("Efficiency by strategy"));
    const canvas = chartCanvas();
    host.append(canvas);
    const series = [];
    for (const id of ids) {
      const payload = await api.efficiency(id);
      series.push({ label: this.runs.get(id)?.label ?? shortId(id), efficiency: payload.efficiency });
    }
    const chart = efficiencyChart(series);
    drawLineChart(canvas, chart);
    const origin = sharedOrigin(chart);
    const note = document.createElement("p");
    note.className = "hint";
    note.textContent =
      origin !== null
        ? `Common starting efficiency: ${origin.toFixed(5)}`
        : "Runs start from different initial efficiencies.";
    host.append(note);

    try {
      const comparison = await api.comparison(ids);
      const table = document.createElement("table");
      table.className = "data-table";
      table.innerHTML =
        "<tr><th>strategy</th><th>mean ΔP</th><th>median ΔP</th><th>% drop</th><th>promotions</th><th>final efficiency</th></tr>";
      for (const row of comparisonByFinalEfficiency(comparison.rows)) {
        const tr = document.createElement("tr");
        tr.innerHTML =
          `<td>${row.strategy}</td><td>${row.mean_delta_p.toFixed(4)}</td>` +
          `<td>${row.median_delta_p.toFixed(4)}</td><td>${(100 * row.share_negative).toFixed(1)}%</td>` +
          `<td>${row.promotions}</td><td>${row.final_efficiency.toFixed(5)}</td>`;
        table.append(tr);
      }
      host.append(heading("Comparison"), table);
    } catch (error) {
      const note = document.createElement("p");
      note.className = "field-error";
      note.textContent = `comparison unavailable: ${error instanceof Error ? error.message : error}`;
      host.append(note);
    }
  }

  private panel(name: string): HTMLElement {
    const id = `panel-${name}`;
    let host = document.getElementById(id);
    if (!host) {
      host = document.createElement("div");
      host.id = id;
      host.className = "panel";
      this.viewsRoot.append(host);
    }
    return host;
  }

  private async showRun(runId: string): Promise<void> {
    this.activeRun = runId;
    const label = this.runs.get(runId)?.label ?? shortId(runId);
    const host = this.panel("run");
    host.innerHTML = "";
    host.append(heading(`Run ${label}`));

    const efficiency = await api.efficiency(runId);
    host.append(subheading("Efficiency over time"));
    const effCanvas = chartCanvas();
    host.append(effCanvas);
    drawLineChart(effCanvas, efficiencyChart([{ label, efficiency: efficiency.efficiency }]));

    const summary = await api.deltaSummary(runId);
    host.append(
      subheading(
        `Promotion shocks (n=${summary.count}, mean ${summary.mean.toFixed(4)}, ` +
          `${(100 * summary.share_negative).toFixed(1)}% drops)`,
      ),
    );
    const histCanvas = chartCanvas();
    host.append(histCanvas);
    drawHistogram(histCanvas, histogramBars(summary));

    const matrix = await api.pathMatrix(runId);
    host.append(subheading("Mean shock by promotion path"));
    const heatCanvas = chartCanvas(420, 340);
    host.append(heatCanvas);
    drawHeatmap(heatCanvas, heatmapCells(matrix.cells));

    const negatives = await api.negatives(runId);
    host.append(subheading("Negative shocks per step"));
    const negCanvas = chartCanvas();
    host.append(negCanvas);

    const selectorRow = document.createElement("div");
    selectorRow.className = "form-row";
    const selectorLabel = document.createElement("span");
    selectorLabel.textContent = "Inspect step:";
    const selector = document.createElement("select");
    negatives.counts.forEach((count, i) => {
      const option = document.createElement("option");
      option.value = String(i + 1);
      option.textContent = `step ${i + 1} (${count} drops)`;
      selector.append(option);
    });
    const agentsOut = document.createElement("div");
    agentsOut.className = "affected-agents";
    const showStep = async (step: number) => {
      selector.value = String(step);
      const events = await api.eventsAtStep(runId, step);
      const ids = affectedAgents(events.events);
      agentsOut.innerHTML = `<strong>${ids.length}</strong> agents with a drop at step ${step}: `;
      ids.slice(0, 200).forEach((aid) => {
        const link = document.createElement("button");
        link.type = "button";
        link.className = "agent-link";
        link.textContent = String(aid);
        link.addEventListener("click", () => this.showAgent(runId, aid));
        agentsOut.append(link, " ");
      });
      if (ids.length > 200) {
        agentsOut.append(`… and ${ids.length - 200} more`);
      }
    };
    selector.addEventListener("change", () => void showStep(Number(selector.value)));
    selectorRow.append(selectorLabel, selector);
    host.append(selectorRow, agentsOut);
    drawBars(negCanvas, negativeBars(negatives.counts), (step) => void showStep(step));
    if (negatives.counts.length > 0) {
      await showStep(1);
    }

    const inspector = document.createElement("div");
    inspector.className = "form-row";
    const inspectorLabel = document.createElement("span");
    inspectorLabel.textContent = "Inspect agent id:";
    const input = document.createElement("input");
    input.type = "number";
    input.min = "0";
    const go = document.createElement("button");
    go.type = "button";
    go.textContent = "Show trajectory";
    go.addEventListener("click", () => void this.showAgent(runId, Number(input.value)));
    inspector.append(inspectorLabel, input, go);
    host.append(subheading("Agent inspector"), inspector);
  }

  private async showAgent(runId: string, agentId: number): Promise<void> {
    const host = this.panel("agent");
    host.innerHTML = "";
    try {
      const agent = await api.agent(runId, agentId);
      const exitText = agent.exited_at === null ? "active at horizon" : `exited at step ${agent.exited_at}`;
      host.append(
        heading(`Agent ${agent.agent_id}`),
        subheading(
          `joined at step ${agent.joined_at}, ${exitText}` +
            (agent.blacklisted ? ", blacklisted after demotion" : ""),
        ),
      );
      const canvas = chartCanvas();
      host.append(canvas);
      const series = [
        {
          label: "performance",
          points: agent.points.map((p) => ({ x: p.step, y: p.performance })),
        },
      ];
      drawLineChart(canvas, series, levelBands(agent.points));

      const table = document.createElement("table");
      table.className = "data-table";
      const skills = Object.keys(agent.competence_snapshots[0]?.skills ?? {});
      table.innerHTML = `<tr><th>step</th>${skills.map((s) => `<th>${s}</th>`).join("")}</tr>`;
      for (const row of skillChangeRows(agent.competence_snapshots)) {
        const tr = document.createElement("tr");
        tr.innerHTML =
          `<td>${row.step}</td>` +
          skills
            .map((s) => `<td class="${row.changed[s] ? "skill-changed" : ""}">${row.skills[s].toFixed(5)}</td>`)
            .join("");
        table.append(tr);
      }
      host.append(subheading("Competence (training changes highlighted)"), table);
    } catch (error) {
      const note = document.createElement("p");
      note.className = "field-error";
      note.textContent =
        error instanceof ApiError && error.status === 404
          ? `agent ${agentId} not found in this run`
          : `could not load agent: ${error instanceof Error ? error.message : error}`;
      host.append(note);
    }
  }
}

function section(title: string, id: string): HTMLElement {
  const element = document.createElement("section");
  element.id = id;
  element.append(heading(title));
  return element;
}

function heading(text: string): HTMLElement {
  const h = document.createElement("h2");
  h.textContent = text;
  return h;
}

function subheading(text: string): HTMLElement {
  const h = document.createElement("h3");
  h.textContent = text;
  return h;
}

function chartCanvas(width = 860, height = 300): HTMLCanvasElement {
  const canvas = document.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  canvas.className = "chart";
  return canvas;
}

void new Dashboard().start();
