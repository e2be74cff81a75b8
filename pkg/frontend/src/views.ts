// The four planner views. All computed numbers are server-computed and
// displayed at 4 significant figures; download buttons emit exactly the
// server's payload. Results are visibly marked stale when any input that
// fed them changes, and responses are matched to request tokens so a slow
// reply never overwrites a newer one.

import { ApiClient, ApiError } from "./api.js";
import { heatmap, lineChart } from "./charts.js";
import { checkPilotCsv } from "./csv.js";
import { jsonDownload, money, sig4, tableToCsv } from "./format.js";
import { PRESETS, presetByName } from "./presets.js";
import {
  ViewState,
  acceptError,
  acceptResult,
  beginRequest,
  initialViewState,
  markStale,
} from "./state.js";
import type {
  BudgetResult,
  DesignRequest,
  DesignResult,
  Envelope,
  EstimateResult,
  SensitivityRow,
} from "./types.js";
import {
  parseNumber,
  parseNumberList,
  validateCosts,
  validateGroup,
  validateMultipliers,
  validatePower,
  FieldError,
} from "./validate.js";

export interface App {
  client: ApiClient;
  root: HTMLElement;
  design: ViewState<Envelope<DesignResult>>;
  budget: ViewState<Envelope<BudgetResult>>;
  sensitivity: ViewState<Envelope<{ rows: SensitivityRow[] }>>;
  estimate: ViewState<Envelope<EstimateResult>>;
}

export function createApp(root: HTMLElement, client: ApiClient): App {
  return {
    client,
    root,
    design: initialViewState(),
    budget: initialViewState(),
    sensitivity: initialViewState(),
    estimate: initialViewState(),
  };
}

// ---------------------------------------------------------------------------
// small DOM helpers
// ---------------------------------------------------------------------------

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function input(id: string): HTMLInputElement {
  return el(id) as HTMLInputElement;
}

function readNumber(id: string): number | null {
  return parseNumber(input(id).value);
}

function clearFieldErrors(scope: HTMLElement): void {
  scope.querySelectorAll(".field-error").forEach((n) => (n.textContent = ""));
  scope.querySelectorAll("input.invalid").forEach((n) => n.classList.remove("invalid"));
}

function showFieldErrors(errors: FieldError[]): void {
  for (const err of errors) {
    const target = document.querySelector<HTMLElement>(
      `[data-error-for="${err.path}"]`);
    if (target) target.textContent = err.message;
    const field = document.getElementById(err.path);
    if (field) field.classList.add("invalid");
  }
}

function numberField(path: string, label: string, value: number | "" = ""): string {
  return `<label class="field">
    <span>${label}</span>
    <input id="${path}" type="text" inputmode="decimal" value="${value}">
    <span class="field-error" data-error-for="${path}"></span>
  </label>`;
}

function groupFields(prefix: string, title: string): string {
  return `<fieldset>
    <legend>${title}</legend>
    ${numberField(`${prefix}.sigma2_eps`, "population variance sigma2_eps")}
    ${numberField(`${prefix}.r_delta`, "direct-noise ratio r_delta")}
    ${numberField(`${prefix}.r_phi`, "indirect-noise ratio r_phi")}
  </fieldset>`;
}

function statusLine(state: ViewState<unknown>): string {
  if (state.inFlight) return `<p class="status pending">computing…</p>`;
  if (state.error) return `<p class="status error">${state.error}</p>`;
  if (state.stale && state.result) {
    return `<p class="status stale">inputs changed — results below are stale, optimize again</p>`;
  }
  return "";
}

function bindDownload(id: string, filename: string, text: () => string): void {
  el(id).addEventListener("click", () => {
    const blob = new Blob([text()], { type: "text/plain;charset=utf-8" });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = filename;
    a.click();
    URL.revokeObjectURL(url);
  });
}

function markAllStale(app: App): void {
  markStale(app.design);
  markStale(app.budget);
  markStale(app.sensitivity);
}

// ---------------------------------------------------------------------------
// shared form fragments
// ---------------------------------------------------------------------------

function readGroups(): { errors: FieldError[]; group1: any; group2: any } {
  const raw1 = {
    sigma2_eps: readNumber("group1.sigma2_eps"),
    r_delta: readNumber("group1.r_delta"),
    r_phi: readNumber("group1.r_phi"),
  };
  const raw2 = {
    sigma2_eps: readNumber("group2.sigma2_eps"),
    r_delta: readNumber("group2.r_delta"),
    r_phi: readNumber("group2.r_phi"),
  };
  const errors = [...validateGroup(raw1, "group1"), ...validateGroup(raw2, "group2")];
  return { errors, group1: raw1, group2: raw2 };
}

export function designTable(result: DesignResult): string {
  const rows = result.groups
    .map(
      (g, i) => `<tr><td>group ${i + 1}</td><td>${g.n_total}</td><td>${g.n_direct}</td>
        <td>${g.k_reps}</td><td>${sig4(g.se)}</td>
        <td>${sig4(g.sampling_fraction_reported)}</td></tr>`)
    .join("");
  const alloc = result.allocation !== undefined
    ? `<p>budget share to group 1: <strong>${sig4(result.allocation)}</strong></p>`
    : "";
  return `<table>
    <thead><tr><th></th><th>N</th><th>n</th><th>K</th><th>SE</th><th>fraction</th></tr></thead>
    <tbody>${rows}</tbody></table>
    ${alloc}
    <p>combined SE <strong>${sig4(result.achieved_se)}</strong>;
       spent ${money(result.spent_budget)}, slack ${money(result.slack_budget)}</p>`;
}

// ---------------------------------------------------------------------------
// Design view
// ---------------------------------------------------------------------------

export function renderDesignView(app: App): void {
  const container = el("view-design");
  const presetOptions = PRESETS.map(
    (p) => `<option value="${p.name}">${p.label}</option>`).join("");
  container.innerHTML = `
    <div class="controls">
      <label>preset
        <select id="design-preset">
          <option value="">(choose a case study)</option>${presetOptions}
        </select>
      </label>
    </div>
    <form id="design-form">
      ${groupFields("group1", "group 1 (intervention)")}
      ${groupFields("group2", "group 2 (control)")}
      <fieldset><legend>costs</legend>
        ${numberField("costs.c_q", "per participant c_q")}
        ${numberField("costs.c_b", "per direct measurement c_b")}
        ${numberField("costs.c_total", "total budget")}
      </fieldset>
      <button type="submit" id="design-optimize">Optimize</button>
    </form>
    <div id="design-status"></div>
    <div id="design-result"></div>`;

  el("design-preset").addEventListener("change", () => {
    const preset = presetByName((el("design-preset") as HTMLSelectElement).value);
    if (!preset) return;
    input("group1.sigma2_eps").value = String(preset.group1.sigma2_eps);
    input("group1.r_delta").value = String(preset.group1.r_delta);
    input("group1.r_phi").value = String(preset.group1.r_phi);
    input("group2.sigma2_eps").value = String(preset.group2.sigma2_eps);
    input("group2.r_delta").value = String(preset.group2.r_delta);
    input("group2.r_phi").value = String(preset.group2.r_phi);
    input("costs.c_q").value = String(preset.costs.c_q);
    input("costs.c_b").value = String(preset.costs.c_b);
    input("costs.c_total").value = String(preset.costs.c_total);
    markAllStale(app);
    refreshDesignOutput(app);
  });

  container.querySelectorAll("input").forEach((node) =>
    node.addEventListener("input", () => {
      markAllStale(app);
      refreshDesignOutput(app);
    }));

  el("design-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void runDesign(app);
  });
  refreshDesignOutput(app);
}

async function runDesign(app: App): Promise<void> {
  const scope = el("view-design");
  clearFieldErrors(scope);
  const { errors, group1, group2 } = readGroups();
  const costs = {
    c_q: readNumber("costs.c_q"),
    c_b: readNumber("costs.c_b"),
    c_total: readNumber("costs.c_total"),
  };
  errors.push(...validateCosts(costs, true));
  if (errors.length) {
    showFieldErrors(errors);
    return; // no request leaves the browser on invalid input
  }
  const request = { group1, group2, costs } as DesignRequest;
  const token = beginRequest(app.design);
  refreshDesignOutput(app);
  try {
    const response = await app.client.design(request);
    if (acceptResult(app.design, token, response)) refreshDesignOutput(app);
  } catch (err) {
    if (err instanceof ApiError && err.fieldErrors.length) showFieldErrors(err.fieldErrors);
    const message = err instanceof ApiError
      ? err.minFeasibleBudget !== undefined
        ? `${err.message} (minimal feasible budget ${money(err.minFeasibleBudget)})`
        : err.message
      : String(err);
    if (acceptError(app.design, token, message)) refreshDesignOutput(app);
  }
}

function refreshDesignOutput(app: App): void {
  el("design-status").innerHTML = statusLine(app.design);
  const target = el("design-result");
  const envelope = app.design.result;
  if (!envelope) {
    target.innerHTML = "";
    return;
  }
  target.innerHTML = `
    ${designTable(envelope.result)}
    ${envelope.warnings.map((w) => `<p class="warning">${w}</p>`).join("")}
    <button type="button" id="design-download">download data</button>`;
  bindDownload("design-download", "design.json", () => jsonDownload(envelope));
}

// ---------------------------------------------------------------------------
// Budget view
// ---------------------------------------------------------------------------

export function renderBudgetView(app: App): void {
  const container = el("view-budget");
  container.innerHTML = `
    <p>Uses the group parameters from the Design tab plus the unit costs
       below; finds the smallest budget meeting the power target.</p>
    <form id="budget-form">
      <fieldset><legend>power target</legend>
        ${numberField("power.alpha", "two-sided alpha", 0.05)}
        ${numberField("power.power", "power", 0.8)}
        ${numberField("power.delta", "effect size delta", 0.1)}
      </fieldset>
      <fieldset><legend>unit costs</legend>
        ${numberField("budget.c_q", "per participant c_q")}
        ${numberField("budget.c_b", "per direct measurement c_b")}
      </fieldset>
      <button type="submit">Find minimum budget</button>
    </form>
    <div id="budget-status"></div>
    <div id="budget-result"></div>`;

  container.querySelectorAll("input").forEach((node) =>
    node.addEventListener("input", () => {
      markStale(app.budget);
      refreshBudgetOutput(app);
    }));
  el("budget-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void runBudget(app);
  });
  refreshBudgetOutput(app);
}

async function runBudget(app: App): Promise<void> {
  const scope = el("view-budget");
  clearFieldErrors(scope);
  clearFieldErrors(el("view-design"));
  const { errors, group1, group2 } = readGroups();
  const power = {
    alpha: readNumber("power.alpha"),
    power: readNumber("power.power"),
    delta: readNumber("power.delta"),
  };
  const costs = { c_q: readNumber("budget.c_q"), c_b: readNumber("budget.c_b") };
  errors.push(...validatePower(power));
  errors.push(...validateCosts(costs, false).map((e) => ({
    path: e.path.replace("costs.", "budget."), message: e.message })));
  if (errors.length) {
    showFieldErrors(errors);
    return;
  }
  const token = beginRequest(app.budget);
  refreshBudgetOutput(app);
  try {
    const response = await app.client.budget({
      group1, group2,
      costs: { c_q: costs.c_q as number, c_b: costs.c_b as number },
      power: power as { alpha: number; power: number; delta: number },
    });
    if (acceptResult(app.budget, token, response)) refreshBudgetOutput(app);
  } catch (err) {
    if (err instanceof ApiError && err.fieldErrors.length) showFieldErrors(err.fieldErrors);
    if (acceptError(app.budget, token, err instanceof ApiError ? err.message : String(err)))
      refreshBudgetOutput(app);
  }
}

function refreshBudgetOutput(app: App): void {
  el("budget-status").innerHTML = statusLine(app.budget);
  const target = el("budget-result");
  const envelope = app.budget.result;
  if (!envelope) {
    target.innerHTML = "";
    return;
  }
  const r = envelope.result;
  const trace = r.iterations
    .filter((it) => it.se !== null)
    .map((it) => ({ x: it.index, y: it.se as number }));
  target.innerHTML = `
    <p>minimum budget <strong>${money(r.budget)}</strong>
       (target SE ${sig4(r.se_target)}, ${r.corrections} correction step(s),
       finished by ${r.converged_by})</p>
    ${designTable(r.report)}
    <h4>iteration trace (SE by evaluation)</h4>
    ${lineChart(trace, { xLabel: "evaluation", yLabel: "achieved SE" })}
    <button type="button" id="budget-download">download data</button>`;
  bindDownload("budget-download", "budget.json", () => jsonDownload(envelope));
}

// ---------------------------------------------------------------------------
// Sensitivity view
// ---------------------------------------------------------------------------

export function renderSensitivityView(app: App): void {
  const container = el("view-sensitivity");
  container.innerHTML = `
    <p>Re-optimizes the design with the group-1 parameter below misassessed
       by each multiplier, then evaluates the efficiency of that design at
       the true parameters (from the Design tab, including its budget).</p>
    <form id="sensitivity-form">
      <label class="field"><span>axis</span>
        <select id="sensitivity-axis">
          <option value="sigma2_eps">sigma2_eps</option>
          <option value="r_delta">r_delta</option>
          <option value="r_phi">r_phi</option>
        </select>
      </label>
      <label class="field"><span>multipliers (comma separated)</span>
        <input id="sensitivity-multipliers" type="text" value="0.5,0.75,1,1.5,2">
        <span class="field-error" data-error-for="multipliers"></span>
      </label>
      <button type="submit">Scan</button>
    </form>
    <div id="sensitivity-status"></div>
    <div id="sensitivity-result"></div>`;

  el("sensitivity-multipliers").addEventListener("input", () => {
    markStale(app.sensitivity);
    refreshSensitivityOutput(app);
  });
  el("sensitivity-axis").addEventListener("change", () => {
    markStale(app.sensitivity);
    refreshSensitivityOutput(app);
  });
  el("sensitivity-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void runSensitivity(app);
  });
  refreshSensitivityOutput(app);
}

async function runSensitivity(app: App): Promise<void> {
  clearFieldErrors(el("view-sensitivity"));
  clearFieldErrors(el("view-design"));
  const { errors, group1, group2 } = readGroups();
  const costs = {
    c_q: readNumber("costs.c_q"),
    c_b: readNumber("costs.c_b"),
    c_total: readNumber("costs.c_total"),
  };
  errors.push(...validateCosts(costs, true));
  const multipliers = parseNumberList(input("sensitivity-multipliers").value);
  errors.push(...validateMultipliers(multipliers));
  if (errors.length) {
    showFieldErrors(errors);
    return;
  }
  const axis = (el("sensitivity-axis") as HTMLSelectElement).value as
    "sigma2_eps" | "r_delta" | "r_phi";
  const token = beginRequest(app.sensitivity);
  refreshSensitivityOutput(app);
  try {
    const response = await app.client.sensitivity({
      group1, group2,
      costs: { c_q: costs.c_q as number, c_b: costs.c_b as number,
               c_total: costs.c_total as number },
      axis, multipliers: multipliers as number[],
    });
    if (acceptResult(app.sensitivity, token, response)) refreshSensitivityOutput(app);
  } catch (err) {
    if (err instanceof ApiError && err.fieldErrors.length) showFieldErrors(err.fieldErrors);
    if (acceptError(app.sensitivity, token, err instanceof ApiError ? err.message : String(err)))
      refreshSensitivityOutput(app);
  }
}

function refreshSensitivityOutput(app: App): void {
  el("sensitivity-status").innerHTML = statusLine(app.sensitivity);
  const target = el("sensitivity-result");
  const envelope = app.sensitivity.result;
  if (!envelope) {
    target.innerHTML = "";
    return;
  }
  const rows = envelope.result.rows;
  const curve = rows.map((r) => ({ x: r.multiplier, y: r.efficiency }));
  const table = rows
    .map((r) => `<tr><td>${r.multiplier}</td><td>${sig4(r.efficiency)}</td>
      <td>${sig4(r.allocation)}</td>
      <td>${r.n1}/${r.n_total1}/${r.k1}</td><td>${r.n2}/${r.n_total2}/${r.k2}</td></tr>`)
    .join("");
  target.innerHTML = `
    ${lineChart(curve, { xLabel: "multiplier on planned value", yLabel: "efficiency" })}
    ${heatmap([rows.map((r) => r.efficiency)], {
      rowLabels: [rows[0]?.axis ?? ""],
      colLabels: rows.map((r) => `x${r.multiplier}`),
    })}
    <table><thead><tr><th>multiplier</th><th>efficiency</th><th>allocation</th>
      <th>design 1 (n/N/K)</th><th>design 2 (n/N/K)</th></tr></thead>
    <tbody>${table}</tbody></table>
    <button type="button" id="sensitivity-download">download data</button>`;
  bindDownload("sensitivity-download", "sensitivity.csv",
               () => tableToCsv(rows as unknown as Array<Record<string, unknown>>));
}

// ---------------------------------------------------------------------------
// Pilot view
// ---------------------------------------------------------------------------

export function renderPilotView(app: App): void {
  const container = el("view-pilot");
  container.innerHTML = `
    <p>Paste or upload a pilot CSV (<code>subject_id,group,q,m1,…</code>).
       Estimates are computed server-side and can prefill the Design form.</p>
    <input type="file" id="pilot-file" accept=".csv,text/csv">
    <textarea id="pilot-text" rows="8" spellcheck="false"
      placeholder="subject_id,group,q,m1,m2"></textarea>
    <div id="pilot-check"></div>
    <button type="button" id="pilot-estimate" disabled>Estimate parameters</button>
    <div id="pilot-status"></div>
    <div id="pilot-result"></div>`;

  const textarea = el("pilot-text") as HTMLTextAreaElement;
  const runCheck = () => {
    const check = checkPilotCsv(textarea.value);
    el("pilot-check").innerHTML = check.ok
      ? `<p class="status">ok: ${check.rows} rows, groups ${check.groups
          .map((g) => `${g.group} (N=${g.nTotal}, n=${g.nDirect}, K=${g.kMax})`)
          .join("; ")}</p>`
      : `<ul class="error">${check.errors.slice(0, 8).map((e) => `<li>${e}</li>`).join("")}</ul>`;
    (el("pilot-estimate") as HTMLButtonElement).disabled = !check.ok;
  };
  textarea.addEventListener("input", runCheck);
  el("pilot-file").addEventListener("change", async () => {
    const file = (el("pilot-file") as HTMLInputElement).files?.[0];
    if (!file) return;
    textarea.value = await file.text();
    runCheck();
  });
  el("pilot-estimate").addEventListener("click", () => void runEstimate(app));
}

async function runEstimate(app: App): Promise<void> {
  const token = beginRequest(app.estimate);
  el("pilot-status").innerHTML = statusLine(app.estimate);
  try {
    const response = await app.client.estimate(
      (el("pilot-text") as HTMLTextAreaElement).value);
    if (acceptResult(app.estimate, token, response)) refreshPilotOutput(app);
  } catch (err) {
    if (acceptError(app.estimate, token, err instanceof ApiError ? err.message : String(err)))
      el("pilot-status").innerHTML = statusLine(app.estimate);
  }
}

/** Estimates -> design-form values (the pilot round trip), kept pure so the
 * mapping is testable without a DOM. */
export function estimatesToFormValues(
  result: EstimateResult,
): Record<string, Record<string, string>> {
  const out: Record<string, Record<string, string>> = {};
  for (const g of result.groups) {
    out[`group${g.group}`] = {
      sigma2_eps: String(g.sigma2_eps),
      r_delta: String(g.r_delta),
      r_phi: String(g.r_phi),
    };
  }
  return out;
}

/** Copies per-group estimates into the design form. */
export function applyEstimatesToDesignForm(result: EstimateResult): void {
  const values = estimatesToFormValues(result);
  for (const [prefix, fields] of Object.entries(values)) {
    const probe = document.getElementById(`${prefix}.sigma2_eps`);
    if (!probe) continue;
    for (const [field, value] of Object.entries(fields)) {
      input(`${prefix}.${field}`).value = value;
    }
  }
}

function refreshPilotOutput(app: App): void {
  el("pilot-status").innerHTML = statusLine(app.estimate);
  const envelope = app.estimate.result;
  if (!envelope) return;
  const rows = envelope.result.groups
    .map((g) => `<tr><td>${g.group}</td><td>${g.n_total}</td><td>${g.n_direct}</td>
      <td>${g.k_reps}</td><td>${sig4(g.mu_hat)}</td><td>${sig4(g.sigma2_eps)}</td>
      <td>${sig4(g.r_delta)}</td><td>${sig4(g.r_phi)}</td></tr>`)
    .join("");
  el("pilot-result").innerHTML = `
    <table><thead><tr><th>group</th><th>N</th><th>n</th><th>K</th><th>mu</th>
      <th>sigma2_eps</th><th>r_delta</th><th>r_phi</th></tr></thead>
    <tbody>${rows}</tbody></table>
    ${envelope.warnings.map((w) => `<p class="warning">${w}</p>`).join("")}
    <button type="button" id="pilot-apply">use these in the Design form</button>
    <button type="button" id="pilot-download">download data</button>`;
  el("pilot-apply").addEventListener("click", () => {
    applyEstimatesToDesignForm(envelope.result);
    const app_ = appRegistry;
    if (app_) {
      markAllStale(app_);
      refreshDesignOutput(app_);
    }
  });
  bindDownload("pilot-download", "estimates.json", () => jsonDownload(envelope));
}

// renderPilotView's apply button needs the app to mark stale; kept simple
// with a module-level registry set by main.ts
let appRegistry: App | null = null;

export function registerApp(app: App): void {
  appRegistry = app;
}
