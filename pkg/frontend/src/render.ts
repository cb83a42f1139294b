/** HTML/SVG string builders. Pure functions from API data to markup:
 * no DOM access here, so every view is unit-testable as a string and
 * identical state always renders identical markup. */
import type {
  ApiErrorBody,
  Prediction,
  ScmDescription,
  Solution,
} from "./api.js";
import type { ChartMarker, CurvePoint } from "./frontier.js";
import { feasibleCurve } from "./frontier.js";
import type { ExplorerState } from "./state.js";

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function fmtNumber(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  const rounded = Number(value.toPrecision(4));
  return String(rounded);
}

export function bannerHtml(message: string | null): string {
  if (message === null) return "";
  return `<div class="banner" role="alert">${escapeHtml(message)}</div>`;
}

const BADGES: Record<string, string> = {
  actionable: "actionable",
  mutable: "mutable",
  non_actionable: "fixed",
};

function tauTooltip(scm: ScmDescription, name: string): string {
  const out = scm.edges
    .filter((e) => e.from === name)
    .map((e) => `τ(${e.from}→${e.to}) = ${fmtNumber(e.tau)}`);
  return out.length > 0 ? out.join(", ") : "no outgoing edges";
}

/** One labeled numeric input per variable. Non-actionable variables
 * stay editable: they describe the person, they are just never
 * intervened on (the solver enforces that server-side). */
export function variablePanelHtml(
  scm: ScmDescription,
  state: ExplorerState,
): string {
  const rows = scm.variables.map((variable) => {
    const value = state.instance[variable.name];
    const badge = BADGES[variable.actionability] ?? variable.actionability;
    return [
      `<label class="variable" title="${escapeHtml(tauTooltip(scm, variable.name))}">`,
      `<span class="variable-name">${escapeHtml(variable.name)}</span>`,
      `<span class="badge badge-${variable.actionability}">${badge}</span>`,
      `<input type="number" step="any" data-variable="${escapeHtml(variable.name)}"`,
      ` value="${value === undefined ? "" : String(value)}">`,
      "</label>",
    ].join("");
  });
  return `<div class="variables">${rows.join("")}</div>`;
}

export function predictionHtml(pred: Prediction | null): string {
  if (pred === null) return '<p class="muted">no prediction yet</p>';
  const verdict = pred.label === 1 ? "favorable" : "unfavorable";
  return [
    `<p class="prediction prediction-${verdict}">`,
    `score ${fmtNumber(pred.score)}, `,
    `p(favorable) = ${fmtNumber(pred.probability)} (${verdict})`,
    "</p>",
  ].join("");
}

export type SolutionView =
  | { kind: "idle" }
  | { kind: "loading" }
  | { kind: "solution"; solution: Solution }
  | { kind: "error"; body: ApiErrorBody };

export function solutionCardHtml(view: SolutionView): string {
  switch (view.kind) {
    case "idle":
      return '<div class="card muted">enter or sample an individual</div>';
    case "loading":
      return '<div class="card muted">computing…</div>';
    case "error": {
      const title =
        view.body.code === "infeasible" ? "No feasible action" : "Request failed";
      return [
        `<div class="card card-${view.body.code}">`,
        `<h3>${escapeHtml(title)}</h3>`,
        `<p class="error-message">${escapeHtml(view.body.message)}</p>`,
        "</div>",
      ].join("");
    }
    case "solution": {
      const sol = view.solution;
      const moves = Object.entries(sol.action);
      if (moves.length === 0) {
        return [
          '<div class="card card-favorable"><h3>No action needed</h3>',
          `<p>already favorable: p = ${fmtNumber(sol.probability)}</p></div>`,
        ].join("");
      }
      const rows = moves
        .map(
          ([name, delta]) =>
            `<tr><td>${escapeHtml(name)}</td>` +
            `<td class="num">${delta >= 0 ? "+" : ""}${fmtNumber(delta)}</td></tr>`,
        )
        .join("");
      const cost = sol.cost;
      const costLine = cost
        ? `c_s = ${fmtNumber(cost.c_s)}, c_t = ${fmtNumber(cost.c_t)}, ` +
          `total = ${fmtNumber(cost.total)}`
        : "";
      return [
        '<div class="card card-solution"><h3>Recommended action</h3>',
        `<table class="action"><tbody>${rows}</tbody></table>`,
        `<p class="cost">${costLine}</p>`,
        `<p>post-action p(favorable) = ${fmtNumber(sol.probability)}</p>`,
        "</div>",
      ].join("");
    }
  }
}

const WIDTH = 640;
const HEIGHT = 260;
const PAD = { left: 46, right: 14, top: 20, bottom: 34 };

function xPosition(index: number, count: number): number {
  const span = WIDTH - PAD.left - PAD.right;
  return count <= 1 ? PAD.left + span / 2 : PAD.left + (span * index) / (count - 1);
}

export function frontierChartSvg(
  points: CurvePoint[],
  markers: ChartMarker[],
): string {
  const feasible = points.filter((pt) => pt.feasible);
  if (points.length === 0 || feasible.length === 0) {
    return '<p class="empty">no feasible frontier for this scenario</p>';
  }
  const xOf = new Map(points.map((pt, i) => [pt.lambda, xPosition(i, points.length)]));
  const top = Math.max(
    ...feasibleCurve(points, "c_s").map((p) => p.value),
    ...feasibleCurve(points, "c_t").map((p) => p.value),
    1e-9,
  );
  const yOf = (value: number): number =>
    HEIGHT - PAD.bottom - ((HEIGHT - PAD.top - PAD.bottom) * value) / top;

  const line = (key: "c_s" | "c_t"): string =>
    feasibleCurve(points, key)
      .map((p) => `${(xOf.get(p.lambda) ?? 0).toFixed(1)},${yOf(p.value).toFixed(1)}`)
      .join(" ");

  const dots = feasible
    .map((pt) => {
      const x = (xOf.get(pt.lambda) ?? 0).toFixed(1);
      return (
        `<circle class="dot-cs" cx="${x}" cy="${yOf(pt.c_s ?? 0).toFixed(1)}" r="3">` +
        `<title>λ=${fmtNumber(pt.lambda)}: ${pt.support.join("+")}</title></circle>`
      );
    })
    .join("");

  const crosses = points
    .filter((pt) => !pt.feasible)
    .map((pt) => {
      const x = (xOf.get(pt.lambda) ?? 0).toFixed(1);
      return `<text class="infeasible-mark" x="${x}" y="${HEIGHT - PAD.bottom + 14}">×</text>`;
    })
    .join("");

  const markerSvg = markers
    .map((marker) => {
      const x = (xOf.get(marker.lambda) ?? 0).toFixed(1);
      return (
        `<g class="switch-marker"><line x1="${x}" y1="${PAD.top}" x2="${x}"` +
        ` y2="${HEIGHT - PAD.bottom}"></line>` +
        `<text x="${x}" y="${PAD.top - 6}">${escapeHtml(marker.label)}</text></g>`
      );
    })
    .join("");

  const ticks = points
    .map((pt) => {
      const x = (xOf.get(pt.lambda) ?? 0).toFixed(1);
      return `<text class="tick" x="${x}" y="${HEIGHT - 8}">${fmtNumber(pt.lambda)}</text>`;
    })
    .join("");

  return [
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="cost frontier">`,
    `<line class="axis" x1="${PAD.left}" y1="${HEIGHT - PAD.bottom}"`,
    ` x2="${WIDTH - PAD.right}" y2="${HEIGHT - PAD.bottom}"></line>`,
    `<text class="axis-label" x="${WIDTH / 2}" y="${HEIGHT - 22}">λ</text>`,
    `<polyline class="curve-cs" fill="none" points="${line("c_s")}"></polyline>`,
    `<polyline class="curve-ct" fill="none" points="${line("c_t")}"></polyline>`,
    dots,
    crosses,
    markerSvg,
    ticks,
    `<text class="legend legend-cs" x="${PAD.left}" y="${PAD.top - 6}">c_s</text>`,
    `<text class="legend legend-ct" x="${PAD.left + 40}" y="${PAD.top - 6}">c_t</text>`,
    "</svg>",
  ].join("");
}
