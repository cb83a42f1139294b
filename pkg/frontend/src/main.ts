/** Browser entry point. Everything stateful lives here: the single
 * ExplorerState, the one in-flight request pair, and the URL sync.
 * Rendering is delegated to the pure builders in render.ts. */
import { ApiClient, ApiError } from "./api.js";
import type { ScmDescription, RecourseRequest } from "./api.js";
import { curvePoints, frontierSummary, switchMarkers } from "./frontier.js";
import {
  bannerHtml,
  frontierChartSvg,
  predictionHtml,
  solutionCardHtml,
  variablePanelHtml,
  type SolutionView,
} from "./render.js";
import { defaultState, parseState, serializeState } from "./state.js";
import type { ExplorerState } from "./state.js";

const DEBOUNCE_MS = 200;

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

const els = {
  banner: must<HTMLDivElement>("banner"),
  variables: must<HTMLDivElement>("variables"),
  prediction: must<HTMLDivElement>("prediction"),
  solution: must<HTMLDivElement>("solution"),
  frontier: must<HTMLDivElement>("frontier"),
  summary: must<HTMLParagraphElement>("summary"),
  p: must<HTMLSelectElement>("control-p"),
  norm: must<HTMLSelectElement>("control-norm"),
  variant: must<HTMLSelectElement>("control-variant"),
  lambda: must<HTMLSelectElement>("control-lambda"),
  budget: must<HTMLInputElement>("control-budget"),
  grid: must<HTMLInputElement>("control-grid"),
  seed: must<HTMLInputElement>("control-seed"),
  sample: must<HTMLButtonElement>("sample"),
  controls: must<HTMLElement>("controls"),
};

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8000";
const client = new ApiClient(apiBase);

let state: ExplorerState = parseState(window.location.search, defaultState());
let scm: ScmDescription | null = null;
let inflight: AbortController | null = null;
let debounceTimer: number | undefined;

function syncUrl(): void {
  const query = serializeState(state);
  if (params.has("api")) query.set("api", apiBase);
  history.replaceState(null, "", `${window.location.pathname}?${query}`);
}

function setOffline(message: string | null): void {
  els.banner.innerHTML = bannerHtml(message);
  const disabled = message !== null;
  for (const el of els.controls.querySelectorAll("input, select, button")) {
    (el as HTMLInputElement).disabled = disabled;
  }
  for (const el of els.variables.querySelectorAll("input")) {
    el.disabled = disabled;
  }
}

function renderControls(): void {
  els.p.value = String(state.p);
  els.norm.value = state.normalization;
  els.variant.value = state.variant;
  const lambdas = [...new Set([...state.lambdas, state.lambda])].sort(
    (a, b) => a - b,
  );
  els.lambda.innerHTML = lambdas
    .map((lam) => `<option value="${lam}">${lam}</option>`)
    .join("");
  els.lambda.value = String(state.lambda);
  els.budget.value = state.timeBudget === null ? "" : String(state.timeBudget);
  els.grid.value = state.lambdas.join(",");
  els.seed.value = String(state.seed);
}

function renderVariables(): void {
  if (scm === null) return;
  els.variables.innerHTML = variablePanelHtml(scm, state);
  for (const input of els.variables.querySelectorAll("input")) {
    input.addEventListener("change", () => {
      const name = input.dataset["variable"];
      const value = Number(input.value);
      if (name !== undefined && Number.isFinite(value)) {
        state.instance[name] = value;
        scheduleRefresh();
      }
    });
  }
}

function recourseRequest(): RecourseRequest {
  return {
    instance: { ...state.instance },
    cost_spec: {
      p: state.p,
      normalization: state.normalization,
      lambda: state.lambda,
      time_variant: state.variant,
      time_budget: state.timeBudget,
    },
  };
}

/** One controller covers the whole refresh; starting a new refresh
 * aborts the previous one so stale responses can never land. */
async function refresh(): Promise<void> {
  if (scm === null) return;
  syncUrl();
  inflight?.abort();
  const controller = new AbortController();
  inflight = controller;
  els.solution.innerHTML = solutionCardHtml({ kind: "loading" });
  try {
    const request = recourseRequest();
    const [prediction, solution, frontier] = await Promise.all([
      client.predict(state.instance, controller.signal),
      client
        .recourse(request, controller.signal)
        .then((sol): SolutionView => ({ kind: "solution", solution: sol }))
        .catch((err: unknown): SolutionView => {
          if (err instanceof ApiError) return { kind: "error", body: err.body };
          throw err;
        }),
      client.frontier({ ...request, lambdas: state.lambdas }, controller.signal),
    ]);
    if (controller.signal.aborted) return;
    setOffline(null);
    els.prediction.innerHTML = predictionHtml(prediction);
    els.solution.innerHTML = solutionCardHtml(solution);
    const points = curvePoints(frontier.points);
    els.frontier.innerHTML = frontierChartSvg(points, switchMarkers(frontier.switches));
    els.summary.textContent = frontierSummary(frontier);
  } catch (err) {
    if (controller.signal.aborted) return;
    if (err instanceof ApiError) {
      els.solution.innerHTML = solutionCardHtml({ kind: "error", body: err.body });
      els.frontier.innerHTML = "";
      els.summary.textContent = "";
    } else {
      setOffline(`cannot reach the recourse service at ${apiBase}`);
    }
  }
}

function scheduleRefresh(): void {
  window.clearTimeout(debounceTimer);
  debounceTimer = window.setTimeout(() => {
    void refresh();
  }, DEBOUNCE_MS);
}

function bindControls(): void {
  els.p.addEventListener("change", () => {
    state.p = Number(els.p.value);
    scheduleRefresh();
  });
  els.norm.addEventListener("change", () => {
    state.normalization = els.norm.value as ExplorerState["normalization"];
    scheduleRefresh();
  });
  els.variant.addEventListener("change", () => {
    state.variant = els.variant.value as ExplorerState["variant"];
    scheduleRefresh();
  });
  els.lambda.addEventListener("change", () => {
    state.lambda = Number(els.lambda.value);
    scheduleRefresh();
  });
  els.budget.addEventListener("change", () => {
    const raw = els.budget.value.trim();
    const value = Number(raw);
    state.timeBudget = raw !== "" && Number.isFinite(value) && value >= 0 ? value : null;
    scheduleRefresh();
  });
  els.grid.addEventListener("change", () => {
    const parsed = els.grid.value
      .split(",")
      .map((part) => Number(part.trim()))
      .filter((lam) => Number.isFinite(lam) && lam >= 0);
    if (parsed.length > 0) {
      state.lambdas = [...new Set(parsed)].sort((a, b) => a - b);
    }
    renderControls();
    scheduleRefresh();
  });
  els.seed.addEventListener("change", () => {
    const value = Number(els.seed.value);
    if (Number.isInteger(value) && value >= 0) state.seed = value;
    syncUrl();
  });
  els.sample.addEventListener("click", () => {
    void sampleIndividual();
  });
}

/** Sampling happens server-side so the page itself stays free of
 * randomness; each click advances the seed so repeat clicks differ
 * but any given URL still reproduces its individual. */
async function sampleIndividual(): Promise<void> {
  try {
    const sampled = await client.sample(state.seed);
    state.instance = { ...sampled.instance };
    state.seed += 1;
    renderControls();
    renderVariables();
    scheduleRefresh();
  } catch (err) {
    if (err instanceof ApiError) {
      els.solution.innerHTML = solutionCardHtml({ kind: "error", body: err.body });
    } else {
      setOffline(`cannot reach the recourse service at ${apiBase}`);
    }
  }
}

async function boot(): Promise<void> {
  renderControls();
  bindControls();
  try {
    scm = await client.scm();
  } catch {
    setOffline(`cannot reach the recourse service at ${apiBase}`);
    return;
  }
  for (const variable of scm.variables) {
    if (!(variable.name in state.instance)) state.instance[variable.name] = 0;
  }
  renderVariables();
  await refresh();
}

void boot();
