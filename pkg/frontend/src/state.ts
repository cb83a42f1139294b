/** Explorer state and its URL-query encoding. The whole what-if
 * scenario lives in the query string so a URL is a shareable,
 * reproducible view; parsing is tolerant and falls back to defaults
 * field by field. */

export type Normalization = "proper_sigma" | "marginal_sigma" | "none";
export type TimeVariant =
  | "longest_path"
  | "weighted_average_raw"
  | "weighted_average_abs";

export interface ExplorerState {
  instance: Record<string, number>;
  p: number;
  normalization: Normalization;
  variant: TimeVariant;
  lambda: number;
  timeBudget: number | null;
  lambdas: number[];
  seed: number;
}

export const DEFAULT_LAMBDA_GRID: readonly number[] = [0, 0.25, 0.5, 1, 2, 5, 10];

const NORMALIZATIONS: readonly Normalization[] = [
  "proper_sigma",
  "marginal_sigma",
  "none",
];
const VARIANTS: readonly TimeVariant[] = [
  "longest_path",
  "weighted_average_raw",
  "weighted_average_abs",
];

export function defaultState(): ExplorerState {
  return {
    instance: {},
    p: 2,
    normalization: "proper_sigma",
    variant: "weighted_average_abs",
    lambda: 0,
    timeBudget: null,
    lambdas: [...DEFAULT_LAMBDA_GRID],
    seed: 0,
  };
}

function finite(raw: string | null): number | null {
  if (raw === null || raw.trim() === "") return null;
  const value = Number(raw);
  return Number.isFinite(value) ? value : null;
}

export function serializeState(state: ExplorerState): URLSearchParams {
  const params = new URLSearchParams();
  for (const name of Object.keys(state.instance).sort()) {
    params.set(`i.${name}`, String(state.instance[name]));
  }
  params.set("p", String(state.p));
  params.set("norm", state.normalization);
  params.set("variant", state.variant);
  params.set("lam", String(state.lambda));
  if (state.timeBudget !== null) {
    params.set("budget", String(state.timeBudget));
  }
  params.set("grid", state.lambdas.join(","));
  params.set("seed", String(state.seed));
  return params;
}

export function parseState(
  query: string | URLSearchParams,
  base?: ExplorerState,
): ExplorerState {
  const params =
    typeof query === "string" ? new URLSearchParams(query) : query;
  const state = base ? structuredClone(base) : defaultState();

  for (const [key, raw] of params.entries()) {
    if (!key.startsWith("i.")) continue;
    const value = finite(raw);
    if (value !== null) state.instance[key.slice(2)] = value;
  }

  const p = finite(params.get("p"));
  if (p !== null && p >= 1) state.p = p;

  const norm = params.get("norm") as Normalization | null;
  if (norm !== null && NORMALIZATIONS.includes(norm)) state.normalization = norm;

  const variant = params.get("variant") as TimeVariant | null;
  if (variant !== null && VARIANTS.includes(variant)) state.variant = variant;

  const lambda = finite(params.get("lam"));
  if (lambda !== null && lambda >= 0) state.lambda = lambda;

  if (params.has("budget")) {
    const budget = finite(params.get("budget"));
    state.timeBudget = budget !== null && budget >= 0 ? budget : null;
  }

  const grid = params.get("grid");
  if (grid !== null) {
    const values = grid
      .split(",")
      .map((tok) => finite(tok))
      .filter((v): v is number => v !== null && v >= 0);
    const unique = [...new Set(values)].sort((a, b) => a - b);
    if (unique.length > 0) state.lambdas = unique;
  }

  const seed = finite(params.get("seed"));
  if (seed !== null && Number.isInteger(seed) && seed >= 0) state.seed = seed;

  return state;
}
