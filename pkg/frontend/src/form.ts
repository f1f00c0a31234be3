// Scenario form: regime selector with an editable weight grid, level-share
// sliders, attrition fields, strategy picker and the numeric knobs. Reads a
// ScenarioBody for POSTing and maps field-path errors (client or server 400)
// onto inline messages at the offending input.

import type { ScenarioBody } from "./types.js";
import type { FieldError } from "./validate.js";

export const REGIME_PRESETS: Record<string, number[][]> = {
  high_mismatch: [
    [0.9, 0.0, 0.0, 0.1],
    [0.5, 0.3, 0.0, 0.2],
    [0.0, 0.5, 0.3, 0.2],
    [0.0, 0.7, 0.1, 0.2],
    [0.0, 0.8, 0.1, 0.1],
  ],
  transferable: [
    [0.9, 0.0, 0.0, 0.1],
    [0.8, 0.1, 0.0, 0.1],
    [0.65, 0.15, 0.1, 0.1],
    [0.4, 0.2, 0.2, 0.2],
    [0.2, 0.4, 0.3, 0.1],
  ],
};

const SKILL_LABELS = ["tech", "mgmt", "comp", "soft"];
const STRATEGIES = [
  "merit",
  "seniority",
  "hybrid",
  "random",
  "selective_demotion",
  "merit_training",
];
const DEFAULT_SHARES = [0.4, 0.25, 0.2, 0.1, 0.05];
const DEFAULT_ATTRITION = [0.05, 0.02, 0.01, 0.005, 0.002];

export class ScenarioForm {
  readonly root: HTMLFormElement;
  private readonly errorSlots = new Map<string, HTMLElement>();
  private regimeEdited = false;

  constructor(onSubmit: (body: ScenarioBody) => void) {
    this.root = document.createElement("form");
    this.root.className = "scenario-form";
    this.root.noValidate = true;

    this.root.append(
      this.numberRow("n_agents", "Agents (N)", 20000, 1),
      this.numberRow("steps", "Steps (T)", 100, 0),
      this.numberRow("seed", "Seed", 42),
      this.regimeBlock(),
      this.sharesBlock(),
      this.attritionBlock(),
      this.strategyBlock(),
    );

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Launch run";
    const topError = document.createElement("div");
    topError.className = "field-error";
    this.errorSlots.set("", topError);
    this.root.append(submit, topError);

    this.root.addEventListener("submit", (event) => {
      event.preventDefault();
      this.clearErrors();
      onSubmit(this.read());
    });
  }

  private numberRow(id: string, label: string, value: number, min?: number): HTMLElement {
    const row = document.createElement("label");
    row.className = "form-row";
    const span = document.createElement("span");
    span.textContent = label;
    const input = document.createElement("input");
    input.type = "number";
    input.id = `field-${id}`;
    input.value = String(value);
    input.step = "any";
    if (min !== undefined) {
      input.min = String(min);
    }
    const error = document.createElement("em");
    error.className = "field-error";
    this.errorSlots.set(id, error);
    row.append(span, input, error);
    return row;
  }

  private regimeBlock(): HTMLElement {
    const block = document.createElement("fieldset");
    block.innerHTML = "<legend>Role-profile regime</legend>";
    const select = document.createElement("select");
    select.id = "field-regime";
    for (const name of [...Object.keys(REGIME_PRESETS), "custom"]) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      select.append(option);
    }
    const grid = document.createElement("table");
    grid.className = "weights-grid";
    const head = document.createElement("tr");
    head.innerHTML = "<th></th>" + SKILL_LABELS.map((s) => `<th>${s}</th>`).join("");
    grid.append(head);
    for (let lvl = 0; lvl < 5; lvl++) {
      const tr = document.createElement("tr");
      const th = document.createElement("th");
      th.textContent = `L${lvl + 1}`;
      tr.append(th);
      for (let k = 0; k < 4; k++) {
        const td = document.createElement("td");
        const input = document.createElement("input");
        input.type = "number";
        input.step = "0.05";
        input.min = "0";
        input.max = "1";
        input.id = `weight-${lvl}-${k}`;
        input.addEventListener("input", () => {
          this.regimeEdited = true;
          select.value = "custom";
        });
        td.append(input);
        tr.append(td);
      }
      const error = document.createElement("em");
      error.className = "field-error";
      this.errorSlots.set(`regime.weights[${lvl}]`, error);
      const td = document.createElement("td");
      td.append(error);
      tr.append(td);
      grid.append(tr);
    }
    select.addEventListener("change", () => {
      if (select.value !== "custom") {
        this.fillWeights(REGIME_PRESETS[select.value]);
        this.regimeEdited = false;
      }
    });
    const gridError = document.createElement("em");
    gridError.className = "field-error";
    this.errorSlots.set("regime.weights", gridError);
    this.errorSlots.set("regime", gridError);
    block.append(select, grid, gridError);
    this.root.append(block);
    queueMicrotask(() => this.fillWeights(REGIME_PRESETS.high_mismatch));
    return block;
  }

  private fillWeights(table: number[][]): void {
    for (let lvl = 0; lvl < 5; lvl++) {
      for (let k = 0; k < 4; k++) {
        const input = this.root.querySelector<HTMLInputElement>(`#weight-${lvl}-${k}`);
        if (input) {
          input.value = String(table[lvl][k]);
        }
      }
    }
  }

  private sharesBlock(): HTMLElement {
    const block = document.createElement("fieldset");
    block.innerHTML = "<legend>Level shares</legend>";
    for (let lvl = 0; lvl < 5; lvl++) {
      const row = document.createElement("label");
      row.className = "form-row";
      const span = document.createElement("span");
      span.textContent = `L${lvl + 1}`;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.01";
      slider.id = `share-${lvl}`;
      slider.value = String(DEFAULT_SHARES[lvl]);
      const value = document.createElement("output");
      value.textContent = slider.value;
      slider.addEventListener("input", () => {
        value.textContent = slider.value;
      });
      row.append(span, slider, value);
      block.append(row);
    }
    const error = document.createElement("em");
    error.className = "field-error";
    this.errorSlots.set("level_shares", error);
    block.append(error);
    return block;
  }

  private attritionBlock(): HTMLElement {
    const block = document.createElement("fieldset");
    block.innerHTML = "<legend>Attrition rates</legend>";
    for (let lvl = 0; lvl < 5; lvl++) {
      const row = document.createElement("label");
      row.className = "form-row";
      const span = document.createElement("span");
      span.textContent = `L${lvl + 1}`;
      const input = document.createElement("input");
      input.type = "number";
      input.step = "0.001";
      input.min = "0";
      input.max = "0.999";
      input.id = `attrition-${lvl}`;
      input.value = String(DEFAULT_ATTRITION[lvl]);
      const error = document.createElement("em");
      error.className = "field-error";
      this.errorSlots.set(`attrition_rates[${lvl}]`, error);
      row.append(span, input, error);
      block.append(row);
    }
    const error = document.createElement("em");
    error.className = "field-error";
    this.errorSlots.set("attrition_rates", error);
    block.append(error);
    return block;
  }

  private strategyBlock(): HTMLElement {
    const block = document.createElement("fieldset");
    block.innerHTML = "<legend>Promotion strategy</legend>";
    const select = document.createElement("select");
    select.id = "field-strategy";
    for (const kind of STRATEGIES) {
      const option = document.createElement("option");
      option.value = kind;
      option.textContent = kind;
      select.append(option);
    }
    block.append(select);
    const knobs: [string, string, number][] = [
      ["strategy.performance_weight", "alpha (hybrid weight)", 0.7],
      ["strategy.demotion_tolerance", "tau (demotion tolerance)", 0.05],
      ["strategy.performance_gate", "performance gate", 0.8],
      ["strategy.tenure_gate", "tenure gate (years)", 5],
      ["strategy.score_gate", "score gate", 0.5],
    ];
    for (const [path, label, value] of knobs) {
      const row = document.createElement("label");
      row.className = "form-row";
      const span = document.createElement("span");
      span.textContent = label;
      const input = document.createElement("input");
      input.type = "number";
      input.step = "any";
      input.id = `field-${path.replace(/\./g, "-")}`;
      input.value = String(value);
      const error = document.createElement("em");
      error.className = "field-error";
      this.errorSlots.set(path, error);
      row.append(span, input, error);
      block.append(row);
    }
    return block;
  }

  private numberValue(id: string): number {
    const input = this.root.querySelector<HTMLInputElement>(`#${id}`);
    return input ? Number(input.value) : NaN;
  }

  read(): ScenarioBody {
    const weights: number[][] = [];
    for (let lvl = 0; lvl < 5; lvl++) {
      weights.push(
        Array.from({ length: 4 }, (_, k) => this.numberValue(`weight-${lvl}-${k}`)),
      );
    }
    const regimeSelect = this.root.querySelector<HTMLSelectElement>("#field-regime");
    const preset = regimeSelect?.value ?? "high_mismatch";
    return {
      n_agents: this.numberValue("field-n_agents"),
      steps: this.numberValue("field-steps"),
      seed: this.numberValue("field-seed"),
      regime:
        preset !== "custom" && !this.regimeEdited ? preset : { name: "custom", weights },
      level_shares: Array.from({ length: 5 }, (_, lvl) => this.numberValue(`share-${lvl}`)),
      attrition_rates: Array.from({ length: 5 }, (_, lvl) =>
        this.numberValue(`attrition-${lvl}`),
      ),
      strategy: {
        kind: this.root.querySelector<HTMLSelectElement>("#field-strategy")?.value ?? "merit",
        performance_weight: this.numberValue("field-strategy-performance_weight"),
        demotion_tolerance: this.numberValue("field-strategy-demotion_tolerance"),
        performance_gate: this.numberValue("field-strategy-performance_gate"),
        tenure_gate: this.numberValue("field-strategy-tenure_gate"),
        score_gate: this.numberValue("field-strategy-score_gate"),
      },
    };
  }

  showErrors(errors: FieldError[]): void {
    this.clearErrors();
    for (const error of errors) {
      const slot = this.errorSlots.get(error.field) ?? this.errorSlots.get("");
      if (slot) {
        slot.textContent = error.message;
      }
    }
  }

  clearErrors(): void {
    for (const slot of this.errorSlots.values()) {
      slot.textContent = "";
    }
  }
}
